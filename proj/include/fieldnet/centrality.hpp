#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "fieldnet/error.hpp"
#include "fieldnet/graph.hpp"

namespace fieldnet {

/// How shortest paths are measured for betweenness.
enum class PathMode {
  kUnweighted,     // hop count
  kInverseWeight,  // edge length 1 / w, so heavier ties are shorter
};

[[nodiscard]] inline PathMode parse_path_mode(std::string_view s) {
  if (s == "unweighted" || s == "unweighted-paths") return PathMode::kUnweighted;
  if (s == "inverse-weight" || s == "inverse-weight-distances") return PathMode::kInverseWeight;
  throw UsageError("unknown path mode '" + std::string(s) + "' (expected unweighted|inverse-weight)");
}

[[nodiscard]] inline std::string_view to_string(PathMode mode) {
  return mode == PathMode::kUnweighted ? "unweighted" : "inverse-weight";
}

enum class Measure { kBetweenness, kWeightedDegree };

struct CentralityScores {
  Measure measure = Measure::kBetweenness;
  PathMode mode = PathMode::kUnweighted;  // meaningful for betweenness only
  bool normalized = false;
  std::vector<double> values;  // indexed by NodeId::value

  [[nodiscard]] double operator[](NodeId u) const { return values.at(u.value); }
};

namespace detail {

// Relative tolerance under which two weighted path lengths count as equal.
inline constexpr double kPathLengthTolerance = 1e-10;

class BrandesWorkspace {
 public:
  explicit BrandesWorkspace(std::size_t n)
      : sigma_(n), dist_(n), delta_(n), preds_(n) {
    order_.reserve(n);
  }

  // Adds the dependencies of every node on source `s` into `acc`.
  void accumulate(const WeightedGraph& g, NodeId s, PathMode mode, std::vector<double>& acc) {
    std::fill(sigma_.begin(), sigma_.end(), 0.0);
    std::fill(dist_.begin(), dist_.end(), std::numeric_limits<double>::infinity());
    std::fill(delta_.begin(), delta_.end(), 0.0);
    for (auto& p : preds_) p.clear();
    order_.clear();

    sigma_[s.value] = 1.0;
    dist_[s.value] = 0.0;
    if (mode == PathMode::kUnweighted) {
      bfs(g, s);
    } else {
      dijkstra(g, s);
    }

    for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
      const auto w = *it;
      for (const auto v : preds_[w]) delta_[v] += sigma_[v] / sigma_[w] * (1.0 + delta_[w]);
      if (w != s.value) acc[w] += delta_[w];
    }
  }

 private:
  void bfs(const WeightedGraph& g, NodeId s) {
    std::size_t head = 0;
    order_.push_back(s.value);
    while (head < order_.size()) {
      const auto v = order_[head++];
      for (const auto& nb : g.neighbors(NodeId{v})) {
        const auto w = nb.node.value;
        if (std::isinf(dist_[w])) {
          dist_[w] = dist_[v] + 1.0;
          order_.push_back(w);
        }
        if (dist_[w] == dist_[v] + 1.0) {
          sigma_[w] += sigma_[v];
          preds_[w].push_back(v);
        }
      }
    }
  }

  void dijkstra(const WeightedGraph& g, NodeId s) {
    using Entry = std::pair<double, std::uint32_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    std::vector<char> done(dist_.size(), 0);
    queue.emplace(0.0, s.value);
    while (!queue.empty()) {
      const auto [d, v] = queue.top();
      queue.pop();
      if (done[v] || d > dist_[v]) continue;
      done[v] = 1;
      order_.push_back(v);
      for (const auto& nb : g.neighbors(NodeId{v})) {
        const auto w = nb.node.value;
        if (done[w]) continue;
        const double alt = dist_[v] + 1.0 / nb.weight;
        const double tol = kPathLengthTolerance * std::max(1.0, alt);
        if (alt < dist_[w] - tol) {
          dist_[w] = alt;
          sigma_[w] = sigma_[v];
          preds_[w].assign(1, v);
          queue.emplace(alt, w);
        } else if (std::abs(alt - dist_[w]) <= tol) {
          sigma_[w] += sigma_[v];
          preds_[w].push_back(v);
        }
      }
    }
  }

  std::vector<double> sigma_;
  std::vector<double> dist_;
  std::vector<double> delta_;
  std::vector<std::vector<std::uint32_t>> preds_;
  std::vector<std::uint32_t> order_;
};

}  // namespace detail

/// Betweenness B_u = sum over unordered pairs {i, j} (i, j != u) of
/// sigma(i, u, j) / sigma(i, j), by single-source shortest-path counting.
/// Pairs without a path contribute nothing. When `normalized`, scores are
/// divided by (n-1)(n-2)/2.
///
/// Sources are split into a fixed number of blocks whose partial sums are
/// reduced in block order, so the result does not depend on `threads`.
[[nodiscard]] inline CentralityScores betweenness(const WeightedGraph& g, PathMode mode = PathMode::kUnweighted,
                                                  bool normalized = false, unsigned threads = 1) {
  const auto n = g.node_count();
  CentralityScores scores{Measure::kBetweenness, mode, normalized, std::vector<double>(n, 0.0)};
  if (n < 3) return scores;

  constexpr std::size_t kMaxBlocks = 64;
  const std::size_t blocks = std::min(n, kMaxBlocks);
  const std::size_t block_size = (n + blocks - 1) / blocks;
  std::vector<std::vector<double>> partial(blocks, std::vector<double>(n, 0.0));

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    detail::BrandesWorkspace ws(n);
    for (std::size_t b; (b = next.fetch_add(1)) < blocks;) {
      const auto first = b * block_size;
      const auto last = std::min(n, first + block_size);
      for (auto s = first; s < last; ++s) ws.accumulate(g, NodeId{static_cast<std::uint32_t>(s)}, mode, partial[b]);
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(blocks)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (const auto& block : partial) {
    for (std::size_t u = 0; u < n; ++u) scores.values[u] += block[u];
  }
  // Every unordered pair was counted from both ends.
  const double scale = normalized ? 1.0 / (static_cast<double>(n - 1) * static_cast<double>(n - 2)) : 0.5;
  for (auto& v : scores.values) v *= scale;
  return scores;
}

/// WD(u): sum of the weights of the edges at u.
[[nodiscard]] inline CentralityScores weighted_degree(const WeightedGraph& g) {
  CentralityScores scores{Measure::kWeightedDegree, PathMode::kUnweighted, false, {}};
  scores.values.reserve(g.node_count());
  for (std::uint32_t u = 0; u < g.node_count(); ++u) scores.values.push_back(g.strength(NodeId{u}));
  return scores;
}

struct RankedNode {
  std::string label;
  double score = 0.0;
};

/// Top-k nodes by score, descending; equal scores ordered by label. A k
/// larger than the node count returns every node.
[[nodiscard]] inline std::vector<RankedNode> rank(const WeightedGraph& g, const CentralityScores& scores,
                                                  std::size_t k) {
  if (k == 0) throw UsageError("rank: k must be at least 1");
  if (scores.values.size() != g.node_count()) throw DataError("rank: scores do not match the graph");
  std::vector<RankedNode> all;
  all.reserve(g.node_count());
  for (std::uint32_t u = 0; u < g.node_count(); ++u) all.push_back({g.label(NodeId{u}), scores.values[u]});
  std::sort(all.begin(), all.end(), [](const RankedNode& a, const RankedNode& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.label < b.label;
  });
  if (k < all.size()) all.resize(k);
  return all;
}

/// 1-based position of every node in the full ranking.
[[nodiscard]] inline std::vector<std::size_t> rank_positions(const WeightedGraph& g, const CentralityScores& scores) {
  const auto ranked = rank(g, scores, std::max<std::size_t>(1, g.node_count()));
  std::vector<std::size_t> position(g.node_count(), 0);
  for (std::size_t i = 0; i < ranked.size(); ++i) position[g.id_of(ranked[i].label).value] = i + 1;
  return position;
}

}  // namespace fieldnet
