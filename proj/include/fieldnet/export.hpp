#pragma once

#include <algorithm>
#include <charconv>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <system_error>
#include <tuple>
#include <vector>

#include "fieldnet/community.hpp"
#include "fieldnet/csv.hpp"
#include "fieldnet/error.hpp"
#include "fieldnet/graph.hpp"

namespace fieldnet {

/// Shortest decimal text that parses back to exactly `value`.
[[nodiscard]] inline std::string format_weight(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw DataError("cannot format weight");
  return std::string(buf, end);
}

[[nodiscard]] inline double parse_weight(std::string_view text) {
  text = csv::trim(text);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw DataError("bad weight '" + std::string(text) + "'");
  }
  return value;
}

/// A graph plus optional per-node data for export.
struct GraphBundle {
  const WeightedGraph* graph = nullptr;
  std::optional<Partition> partition;
  /// Extra node attributes: name -> one value per node, indexed by NodeId.
  std::map<std::string, std::vector<std::string>> attributes;

  [[nodiscard]] const WeightedGraph& g() const {
    if (!graph) throw DataError("graph bundle has no graph");
    return *graph;
  }

  void validate() const {
    const auto n = g().node_count();
    if (partition && partition->node_count() != n) throw DataError("bundle partition does not cover the graph");
    for (const auto& [name, values] : attributes) {
      if (values.size() != n) throw DataError("bundle attribute '" + name + "' does not cover the graph");
    }
  }
};

namespace detail {

struct LabeledEdge {
  std::string source;
  std::string target;
  double weight;
};

inline std::vector<LabeledEdge> sorted_edges(const WeightedGraph& g) {
  std::vector<LabeledEdge> rows;
  rows.reserve(g.edge_count());
  for (const auto& e : g.edges()) {
    auto a = g.label(e.u);
    auto b = g.label(e.v);
    if (b < a) std::swap(a, b);
    rows.push_back({std::move(a), std::move(b), e.weight});
  }
  std::sort(rows.begin(), rows.end(),
            [](const auto& x, const auto& y) { return std::tie(x.source, x.target) < std::tie(y.source, y.target); });
  return rows;
}

inline void check_writable(std::ostream& out) {
  if (!out) throw IoError("output stream is not writable");
}

}  // namespace detail

/// "source,target,weight" rows with source < target, sorted, so equal graphs
/// give identical bytes.
inline void write_edge_list(std::ostream& out, const GraphBundle& bundle) {
  const auto& g = bundle.g();
  if (g.node_count() == 0) throw DataError("cannot write an empty graph");
  detail::check_writable(out);
  csv::write_row(out, {"source", "target", "weight"});
  for (const auto& e : detail::sorted_edges(g)) csv::write_row(out, {e.source, e.target, format_weight(e.weight)});
  if (!out) throw IoError("failed writing edge list");
}

/// Node labels, one per row in node order. Keeps isolated nodes and node
/// order, which an edge list alone cannot.
inline void write_node_list(std::ostream& out, const WeightedGraph& g) {
  detail::check_writable(out);
  csv::write_row(out, {"label"});
  for (const auto& label : g.labels()) csv::write_row(out, {label});
  if (!out) throw IoError("failed writing node list");
}

/// Reads an edge list. When `nodes` is given its labels are added first, in
/// file order. Duplicate edges (in either orientation), self-loops and
/// malformed rows are errors. The result is frozen.
[[nodiscard]] inline WeightedGraph read_edge_list(std::istream& in, std::istream* nodes = nullptr) {
  if (!in) throw IoError("edge list stream is not readable");
  WeightedGraph g;
  csv::Row row;
  if (nodes) {
    if (!*nodes) throw IoError("node list stream is not readable");
    csv::Reader reader(*nodes);
    bool header = true;
    while (reader.next(row)) {
      if (std::exchange(header, false)) continue;
      if (row.fields.size() != 1) throw DataError("node list line " + std::to_string(row.line) + ": expected 1 column");
      g.add_node(csv::trim(row.fields[0]));
    }
  }
  csv::Reader reader(in);
  bool header = true;
  while (reader.next(row)) {
    if (std::exchange(header, false)) continue;
    const auto where = "edge list line " + std::to_string(row.line) + ": ";
    if (row.fields.size() != 3) throw DataError(where + "expected 3 columns");
    const auto source = csv::trim(row.fields[0]);
    const auto target = csv::trim(row.fields[1]);
    if (source.empty() || target.empty()) throw DataError(where + "empty endpoint");
    if (source == target) throw DataError(where + "self-loop");
    double w;
    try {
      w = parse_weight(row.fields[2]);
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    }
    const auto u = g.add_node(source);
    const auto v = g.add_node(target);
    try {
      g.add_edge(u, v, w);
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    }
  }
  g.freeze();
  return g;
}

/// Rows of (label, community) in node order.
inline void write_partition(std::ostream& out, const WeightedGraph& g, const Partition& p) {
  check_partition(g, p);
  detail::check_writable(out);
  csv::write_row(out, {"label", "community"});
  for (std::uint32_t u = 0; u < g.node_count(); ++u) {
    csv::write_row(out, {g.label(NodeId{u}), std::to_string(p[NodeId{u}])});
  }
}

/// Reads (label, community) rows; every node of `g` must appear exactly once.
/// Community ids are kept when they are already dense and contiguous.
[[nodiscard]] inline Partition read_partition(std::istream& in, const WeightedGraph& g) {
  if (!in) throw IoError("partition stream is not readable");
  constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> tags(g.node_count(), kUnset);
  csv::Reader reader(in);
  csv::Row row;
  bool header = true;
  while (reader.next(row)) {
    if (std::exchange(header, false)) continue;
    const auto where = "partition line " + std::to_string(row.line) + ": ";
    if (row.fields.size() != 2) throw DataError(where + "expected 2 columns");
    const auto id = g.find(csv::trim(row.fields[0]));
    if (!id) throw DataError(where + "unknown node '" + std::string(csv::trim(row.fields[0])) + "'");
    if (tags[id->value] != kUnset) throw DataError(where + "node listed twice");
    const auto text = csv::trim(row.fields[1]);
    std::uint32_t c = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), c);
    if (ec != std::errc{} || end != text.data() + text.size() || c == kUnset) {
      throw DataError(where + "bad community id");
    }
    tags[id->value] = c;
  }
  for (std::uint32_t u = 0; u < tags.size(); ++u) {
    if (tags[u] == kUnset) throw DataError("partition misses node '" + g.label(NodeId{u}) + "'");
  }
  // Keep the file's numbering when it is already 0..C-1.
  try {
    return Partition::from_dense(tags);
  } catch (const DataError&) {
    return Partition(tags);
  }
}

/// Undirected DOT description: nodes sorted by label with community and
/// attribute annotations, then sorted edges with their weight.
inline void write_dot(std::ostream& out, const GraphBundle& bundle) {
  const auto& g = bundle.g();
  if (g.node_count() == 0) throw DataError("cannot write an empty graph");
  bundle.validate();
  detail::check_writable(out);
  auto quote = [](std::string_view s) {
    std::string q = "\"";
    for (const char c : s) {
      if (c == '"' || c == '\\') q.push_back('\\');
      if (c == '\n') {
        q += "\\n";
        continue;
      }
      q.push_back(c);
    }
    q.push_back('"');
    return q;
  };
  std::vector<std::uint32_t> order(g.node_count());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return g.label(NodeId{a}) < g.label(NodeId{b}); });

  out << "graph fieldnet {\n";
  for (const auto u : order) {
    out << "  " << quote(g.label(NodeId{u}));
    std::vector<std::string> props;
    if (bundle.partition) props.push_back("community=" + std::to_string((*bundle.partition)[NodeId{u}]));
    for (const auto& [name, values] : bundle.attributes) props.push_back(quote(name) + "=" + quote(values[u]));
    if (!props.empty()) {
      out << " [";
      for (std::size_t i = 0; i < props.size(); ++i) out << (i ? ", " : "") << props[i];
      out << "]";
    }
    out << ";\n";
  }
  for (const auto& e : detail::sorted_edges(g)) {
    out << "  " << quote(e.source) << " -- " << quote(e.target) << " [weight=" << format_weight(e.weight) << "];\n";
  }
  out << "}\n";
  if (!out) throw IoError("failed writing DOT output");
}

}  // namespace fieldnet
