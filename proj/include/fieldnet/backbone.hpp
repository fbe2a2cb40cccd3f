#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fieldnet/error.hpp"
#include "fieldnet/graph.hpp"

namespace fieldnet {

enum class KeepRule {
  kEitherEndpoint,  // significant for at least one endpoint
  kBothEndpoints,
};

[[nodiscard]] inline KeepRule parse_keep_rule(std::string_view s) {
  if (s == "either" || s == "either-endpoint") return KeepRule::kEitherEndpoint;
  if (s == "both" || s == "both-endpoints") return KeepRule::kBothEndpoints;
  throw UsageError("unknown keep rule '" + std::string(s) + "' (expected either|both)");
}

[[nodiscard]] inline std::string_view to_string(KeepRule rule) {
  return rule == KeepRule::kEitherEndpoint ? "either" : "both";
}

struct FilterParams {
  double alpha = 0.05;
  KeepRule keep_rule = KeepRule::kEitherEndpoint;

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("alpha must lie in (0, 1)");
  }
};

/// Disparity-filter score of an edge as seen from one endpoint: the
/// probability that a uniform random split of the endpoint's strength over
/// its k edges gives this edge a share of at least p = w / s, which is
/// (1 - p)^(k - 1). A degree-1 endpoint scores 0.
[[nodiscard]] inline double endpoint_significance(const WeightedGraph& g, NodeId endpoint, double weight) {
  const auto k = g.degree(endpoint);
  if (k <= 1) return 0.0;
  const double p = weight / g.strength(endpoint);
  return std::pow(1.0 - p, static_cast<double>(k - 1));
}

/// Scores of edge {u, v} seen from u and from v.
[[nodiscard]] inline std::pair<double, double> edge_significance(const WeightedGraph& g, NodeId u, NodeId v) {
  const auto w = g.weight(u, v);
  if (!w) throw DataError("edge_significance: no edge between " + g.label(u) + " and " + g.label(v));
  return {endpoint_significance(g, u, *w), endpoint_significance(g, v, *w)};
}

[[nodiscard]] inline bool keeps_edge(const WeightedGraph& g, const Edge& e, const FilterParams& params) {
  const double from_u = endpoint_significance(g, e.u, e.weight);
  const double from_v = endpoint_significance(g, e.v, e.weight);
  const double score = params.keep_rule == KeepRule::kEitherEndpoint ? std::min(from_u, from_v)
                                                                     : std::max(from_u, from_v);
  return score < params.alpha;
}

/// Backbone of `g`: all nodes, and the edges whose score is below alpha.
/// Scores are always taken from `g` itself, never from a partially filtered
/// graph. The result is frozen.
[[nodiscard]] inline WeightedGraph disparity_filter(const WeightedGraph& g, const FilterParams& params) {
  params.validate();
  WeightedGraph out;
  for (const auto& label : g.labels()) out.add_node(label);
  for (const auto& e : g.edges()) {
    if (keeps_edge(g, e, params)) out.add_edge(e.u, e.v, e.weight);
  }
  out.freeze();
  return out;
}

struct SweepPoint {
  double alpha = 0.0;
  std::size_t edges = 0;
  double density = 0.0;
};

/// Evenly spaced grid start, start + step, ... up to stop (inclusive, with
/// rounding slack). Values are computed as start + i * step.
[[nodiscard]] inline std::vector<double> alpha_grid(double start, double step, double stop) {
  if (!(step > 0.0) || stop < start) throw UsageError("invalid alpha grid");
  std::vector<double> grid;
  for (std::size_t i = 0;; ++i) {
    // Snap to 1e-9 so 0.05 + 2 * 0.05 prints as 0.15.
    const double a = std::round((start + static_cast<double>(i) * step) * 1e9) / 1e9;
    if (a > stop + step * 1e-9) break;
    grid.push_back(a);
  }
  return grid;
}

[[nodiscard]] inline std::vector<SweepPoint> alpha_sweep(const WeightedGraph& g, std::span<const double> alphas,
                                                         KeepRule rule) {
  std::vector<SweepPoint> points;
  points.reserve(alphas.size());
  for (const double a : alphas) {
    const auto filtered = disparity_filter(g, FilterParams{a, rule});
    points.push_back({a, filtered.edge_count(), density(filtered)});
  }
  return points;
}

}  // namespace fieldnet
