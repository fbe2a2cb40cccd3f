#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "fieldnet/centrality.hpp"
#include "fieldnet/community.hpp"
#include "fieldnet/csv.hpp"
#include "fieldnet/error.hpp"
#include "fieldnet/graph.hpp"
#include "fieldnet/ingest.hpp"

namespace fieldnet {

inline constexpr std::string_view kUnknownField = "UNKNOWN";

/// Fixed-point rendering with `digits` decimals (reports use 4).
[[nodiscard]] inline std::string format_fixed(double value, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

[[nodiscard]] inline std::string join(const std::vector<std::string>& parts, std::string_view sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

/// One row of a community table.
struct CommunityStats {
  std::uint32_t id = 0;
  std::size_t size = 0;
  double density = 0.0;
  bool density_defined = true;  // false for single-node communities (reported as 0)
  std::vector<std::string> most_central;     // all members tied at the top betweenness
  std::vector<std::string> dominant_fields;  // all parent fields tied at the top member count
};

/// Per-community size, induced density, most central member(s) by the given
/// (whole-graph) betweenness and most common parent field(s). Ties are all
/// reported, sorted by label. Members missing from the taxonomy do not vote.
[[nodiscard]] inline std::vector<CommunityStats> community_stats(const WeightedGraph& g, const Partition& p,
                                                                 const CentralityScores& betw,
                                                                 const Taxonomy& taxonomy) {
  check_partition(g, p);
  if (betw.values.size() != g.node_count()) throw DataError("community_stats: betweenness does not match the graph");
  std::vector<CommunityStats> rows;
  const auto groups = p.communities();
  rows.reserve(groups.size());
  for (std::uint32_t c = 0; c < groups.size(); ++c) {
    const auto& members = groups[c];
    CommunityStats row;
    row.id = c;
    row.size = members.size();
    if (members.size() >= 2) {
      row.density = density(induced_subgraph(g, members));
    } else {
      row.density = 0.0;
      row.density_defined = false;
    }

    double top = -1.0;
    for (const auto u : members) top = std::max(top, betw[u]);
    for (const auto u : members) {
      if (betw[u] == top) row.most_central.push_back(g.label(u));
    }
    std::sort(row.most_central.begin(), row.most_central.end());

    std::map<std::string, std::size_t> votes;
    for (const auto u : members) {
      if (auto parent = taxonomy.parent(g.label(u))) ++votes[*parent];
    }
    std::size_t best = 0;
    for (const auto& [field, n] : votes) best = std::max(best, n);
    for (const auto& [field, n] : votes) {
      if (n == best) row.dominant_fields.push_back(field);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline void write_community_stats(std::ostream& out, const std::vector<CommunityStats>& rows) {
  csv::write_row(out, {"community", "size", "density", "most_central", "fields"});
  for (const auto& r : rows) {
    csv::write_row(out, {std::to_string(r.id), std::to_string(r.size),
                         r.density_defined ? format_fixed(r.density) : format_fixed(0.0) + " (undefined)",
                         join(r.most_central), join(r.dominant_fields)});
  }
}

struct DensityReduction {
  std::size_t nodes = 0;
  std::size_t edges_before = 0;
  std::size_t edges_after = 0;
  double density_before = 0.0;
  double density_after = 0.0;
  double percent_reduction = 0.0;  // (before - after) / before * 100
};

[[nodiscard]] inline double percent_reduction(double before, double after) {
  if (!(before > 0.0)) throw DataError("percent reduction is undefined for zero initial density");
  return (before - after) / before * 100.0;
}

/// Compares a graph with a filtered version of it over the same node set.
[[nodiscard]] inline DensityReduction density_reduction_report(const WeightedGraph& before,
                                                               const WeightedGraph& after) {
  if (before.node_count() != after.node_count()) throw DataError("density report: node sets differ");
  for (const auto& label : before.labels()) {
    if (!after.find(label)) throw DataError("density report: node sets differ at '" + label + "'");
  }
  DensityReduction r;
  r.nodes = before.node_count();
  r.edges_before = before.edge_count();
  r.edges_after = after.edge_count();
  r.density_before = density(before);
  r.density_after = density(after);
  r.percent_reduction = percent_reduction(r.density_before, r.density_after);
  return r;
}

inline void write_density_reduction(std::ostream& out, const DensityReduction& r) {
  csv::write_row(out, {"metric", "value"});
  csv::write_row(out, {"nodes", std::to_string(r.nodes)});
  csv::write_row(out, {"edges_before", std::to_string(r.edges_before)});
  csv::write_row(out, {"edges_after", std::to_string(r.edges_after)});
  csv::write_row(out, {"density_before", format_fixed(r.density_before)});
  csv::write_row(out, {"density_after", format_fixed(r.density_after)});
  csv::write_row(out, {"percent_reduction", format_fixed(r.percent_reduction, 2)});
}

struct AttributeRow {
  std::string label;
  std::string parent_field;
  std::size_t frequency = 0;
  double betweenness = 0.0;
  double weighted_degree = 0.0;
  std::uint32_t community = 0;
};

/// One row per node with everything needed to redraw the network elsewhere.
/// Nodes absent from the taxonomy get parent field "UNKNOWN"; a node
/// without a frequency entry is an error.
[[nodiscard]] inline std::vector<AttributeRow> node_attribute_export(const WeightedGraph& g,
                                                                     const CentralityScores& betw,
                                                                     const CentralityScores& wdeg,
                                                                     const FrequencyTable& freq, const Partition& p,
                                                                     const Taxonomy& taxonomy) {
  check_partition(g, p);
  if (betw.values.size() != g.node_count() || wdeg.values.size() != g.node_count()) {
    throw DataError("attribute export: scores do not match the graph");
  }
  std::vector<AttributeRow> rows;
  rows.reserve(g.node_count());
  for (std::uint32_t i = 0; i < g.node_count(); ++i) {
    const NodeId u{i};
    const auto& label = g.label(u);
    const auto count = freq.count(label);
    if (count == 0) throw DataError("attribute export: no frequency for '" + label + "'");
    rows.push_back(AttributeRow{label, taxonomy.parent(label).value_or(std::string(kUnknownField)), count, betw[u],
                                wdeg[u], p[u]});
  }
  return rows;
}

inline void write_attributes(std::ostream& out, const std::vector<AttributeRow>& rows) {
  csv::write_row(out, {"label", "parent_field", "frequency", "betweenness", "weighted_degree", "community"});
  for (const auto& r : rows) {
    csv::write_row(out, {r.label, r.parent_field, std::to_string(r.frequency), format_fixed(r.betweenness),
                         format_fixed(r.weighted_degree), std::to_string(r.community)});
  }
}

}  // namespace fieldnet
