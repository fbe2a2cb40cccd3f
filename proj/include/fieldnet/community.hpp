#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "fieldnet/error.hpp"
#include "fieldnet/graph.hpp"

namespace fieldnet {

/// Total assignment of nodes to communities 0..count-1, none of them empty.
class Partition {
 public:
  Partition() = default;

  /// Builds a partition from arbitrary community tags, renumbering them
  /// densely in order of first appearance.
  explicit Partition(std::span<const std::uint32_t> tags) {
    std::map<std::uint32_t, std::uint32_t> dense;
    membership_.reserve(tags.size());
    for (const auto t : tags) {
      auto [it, inserted] = dense.emplace(t, static_cast<std::uint32_t>(dense.size()));
      membership_.push_back(it->second);
    }
    count_ = static_cast<std::uint32_t>(dense.size());
  }

  /// Keeps the given ids, which must cover 0..C-1 with no gaps.
  static Partition from_dense(std::span<const std::uint32_t> ids) {
    Partition p;
    p.membership_.assign(ids.begin(), ids.end());
    std::vector<char> used;
    for (const auto c : ids) {
      if (c >= used.size()) used.resize(c + 1, 0);
      used[c] = 1;
    }
    if (std::find(used.begin(), used.end(), 0) != used.end()) throw DataError("community ids are not contiguous");
    p.count_ = static_cast<std::uint32_t>(used.size());
    return p;
  }

  static Partition singletons(std::size_t n) {
    std::vector<std::uint32_t> tags(n);
    std::iota(tags.begin(), tags.end(), 0u);
    return Partition(tags);
  }

  [[nodiscard]] std::size_t node_count() const noexcept { return membership_.size(); }
  [[nodiscard]] std::uint32_t community_count() const noexcept { return count_; }
  [[nodiscard]] std::uint32_t operator[](NodeId u) const { return membership_.at(u.value); }
  [[nodiscard]] std::span<const std::uint32_t> membership() const noexcept { return membership_; }

  /// Members of each community, in node order.
  [[nodiscard]] std::vector<std::vector<NodeId>> communities() const {
    std::vector<std::vector<NodeId>> out(count_);
    for (std::uint32_t u = 0; u < membership_.size(); ++u) out[membership_[u]].push_back(NodeId{u});
    return out;
  }

  [[nodiscard]] std::vector<std::size_t> sizes() const {
    std::vector<std::size_t> out(count_, 0);
    for (const auto c : membership_) ++out[c];
    return out;
  }

  /// Renumbers communities by descending size; equal sizes keep the order of
  /// their lowest node id.
  [[nodiscard]] Partition relabeled_by_size() const {
    const auto size = sizes();
    std::vector<std::uint32_t> first(count_, std::numeric_limits<std::uint32_t>::max());
    for (std::uint32_t u = 0; u < membership_.size(); ++u) first[membership_[u]] = std::min(first[membership_[u]], u);
    std::vector<std::uint32_t> order(count_);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) {
      if (size[a] != size[b]) return size[a] > size[b];
      return first[a] < first[b];
    });
    std::vector<std::uint32_t> new_id(count_);
    for (std::uint32_t i = 0; i < count_; ++i) new_id[order[i]] = i;
    Partition out;
    out.count_ = count_;
    out.membership_.reserve(membership_.size());
    for (const auto c : membership_) out.membership_.push_back(new_id[c]);
    return out;
  }

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<std::uint32_t> membership_;
  std::uint32_t count_ = 0;
};

inline void check_partition(const WeightedGraph& g, const Partition& p) {
  if (p.node_count() != g.node_count()) {
    throw DataError("partition covers " + std::to_string(p.node_count()) + " nodes, graph has " +
                    std::to_string(g.node_count()));
  }
}

enum class Algorithm { kLouvain, kLeiden };

[[nodiscard]] inline Algorithm parse_algorithm(std::string_view s) {
  if (s == "louvain") return Algorithm::kLouvain;
  if (s == "leiden") return Algorithm::kLeiden;
  throw UsageError("unknown algorithm '" + std::string(s) + "' (expected louvain|leiden)");
}

[[nodiscard]] inline std::string_view to_string(Algorithm a) { return a == Algorithm::kLouvain ? "louvain" : "leiden"; }

struct DetectionConfig {
  double resolution = 1.0;
  std::uint64_t seed = 0;
  /// Louvain: aggregation levels. Leiden: full iterations.
  int max_passes = 100;
  /// Leiden refinement temperature: a merge with modularity gain d is picked
  /// with weight exp(d / randomness).
  double randomness = 0.01;

  void validate() const {
    if (!(resolution > 0.0)) throw UsageError("resolution must be positive");
    if (max_passes < 1) throw UsageError("max_passes must be at least 1");
    if (!(randomness > 0.0)) throw UsageError("randomness must be positive");
  }
};

/// Modularity with resolution gamma:
///   Q = sum_c [ in_c / m - gamma * (tot_c / 2m)^2 ],
/// where in_c is the weight of edges inside c, tot_c the summed strength of
/// its nodes and m the total edge weight.
[[nodiscard]] inline double modularity(const WeightedGraph& g, const Partition& p, double resolution = 1.0) {
  check_partition(g, p);
  const double m = g.total_weight();
  if (g.node_count() == 0 || !(m > 0.0)) throw DataError("modularity is undefined without edge weight");
  std::vector<double> inside(p.community_count(), 0.0);
  std::vector<double> tot(p.community_count(), 0.0);
  for (const auto& e : g.edges()) {
    if (p[e.u] == p[e.v]) inside[p[e.u]] += e.weight;
  }
  for (std::uint32_t u = 0; u < g.node_count(); ++u) tot[p[NodeId{u}]] += g.strength(NodeId{u});
  double q = 0.0;
  for (std::uint32_t c = 0; c < p.community_count(); ++c) {
    const double share = tot[c] / (2.0 * m);
    q += inside[c] / m - resolution * share * share;
  }
  return q;
}

/// Splits every community whose induced subgraph is disconnected into its
/// connected components. Never lowers modularity.
[[nodiscard]] inline Partition split_disconnected(const WeightedGraph& g, const Partition& p) {
  check_partition(g, p);
  constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> tag(g.node_count(), kUnset);
  std::vector<NodeId> stack;
  std::uint32_t next = 0;
  for (std::uint32_t s = 0; s < g.node_count(); ++s) {
    if (tag[s] != kUnset) continue;
    tag[s] = next;
    stack.push_back(NodeId{s});
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      for (const auto& nb : g.neighbors(u)) {
        if (tag[nb.node.value] == kUnset && p[nb.node] == p[u]) {
          tag[nb.node.value] = next;
          stack.push_back(nb.node);
        }
      }
    }
    ++next;
  }
  return Partition(tag);
}

namespace detail {

// Weighted graph over aggregated nodes. Edge weights inside a node are kept
// as self_loop; strength includes them twice, as in the original graph.
struct Level {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adjacency;
  std::vector<double> self_loop;
  std::vector<double> strength;
  double total_weight = 0.0;  // m, the same at every level

  [[nodiscard]] std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(adjacency.size()); }

  static Level from_graph(const WeightedGraph& g) {
    Level level;
    const auto n = g.node_count();
    level.adjacency.resize(n);
    level.self_loop.assign(n, 0.0);
    level.strength.resize(n);
    for (std::uint32_t u = 0; u < n; ++u) {
      for (const auto& nb : g.neighbors(NodeId{u})) level.adjacency[u].emplace_back(nb.node.value, nb.weight);
      level.strength[u] = g.strength(NodeId{u});
    }
    level.total_weight = g.total_weight();
    return level;
  }

  // `membership` must be dense in [0, count).
  [[nodiscard]] Level aggregate(std::span<const std::uint32_t> membership, std::uint32_t count) const {
    Level out;
    out.self_loop.assign(count, 0.0);
    out.strength.assign(count, 0.0);
    out.total_weight = total_weight;
    std::vector<std::map<std::uint32_t, double>> links(count);
    for (std::uint32_t u = 0; u < size(); ++u) {
      const auto cu = membership[u];
      out.self_loop[cu] += self_loop[u];
      out.strength[cu] += strength[u];
      for (const auto& [v, w] : adjacency[u]) {
        if (v < u) continue;
        const auto cv = membership[v];
        if (cu == cv) {
          out.self_loop[cu] += w;
        } else {
          links[cu][cv] += w;
          links[cv][cu] += w;
        }
      }
    }
    out.adjacency.resize(count);
    for (std::uint32_t c = 0; c < count; ++c) out.adjacency[c].assign(links[c].begin(), links[c].end());
    return out;
  }
};

// Community bookkeeping for local moves on one level.
class MoveState {
 public:
  MoveState(const Level& level, std::vector<std::uint32_t> membership, double resolution)
      : level_(level),
        membership_(std::move(membership)),
        total_(level.size(), 0.0),
        count_(level.size(), 0),
        link_(level.size(), 0.0),
        seen_(level.size(), 0),
        resolution_(resolution),
        two_m_(2.0 * level.total_weight) {
    for (std::uint32_t v = 0; v < level.size(); ++v) {
      total_[membership_[v]] += level.strength[v];
      ++count_[membership_[v]];
    }
    for (std::uint32_t c = 0; c < level.size(); ++c) {
      if (count_[c] == 0) empty_.push_back(c);
    }
  }

  [[nodiscard]] std::span<const std::uint32_t> membership() const noexcept { return membership_; }

  // Gain in weight units of inserting v (already removed) into c.
  [[nodiscard]] double gain(std::uint32_t v, std::uint32_t c) const {
    return link_[c] - resolution_ * level_.strength[v] * total_[c] / two_m_;
  }

  // Fills link_ with the weight from v to each neighboring community and
  // records those communities in first-seen order.
  void gather(std::uint32_t v) {
    for (const auto c : touched_) {
      link_[c] = 0.0;
      seen_[c] = 0;
    }
    touched_.clear();
    mark(membership_[v]);
    for (const auto& [u, w] : level_.adjacency[v]) {
      mark(membership_[u]);
      link_[membership_[u]] += w;
    }
  }

  [[nodiscard]] std::span<const std::uint32_t> touched() const noexcept { return touched_; }

  void mark(std::uint32_t c) {
    if (!seen_[c]) {
      seen_[c] = 1;
      touched_.push_back(c);
    }
  }

  void remove(std::uint32_t v) {
    const auto c = membership_[v];
    total_[c] -= level_.strength[v];
    if (--count_[c] == 0) empty_.push_back(c);
  }

  void insert(std::uint32_t v, std::uint32_t c) {
    membership_[v] = c;
    total_[c] += level_.strength[v];
    if (count_[c]++ == 0) std::erase(empty_, c);
  }

  [[nodiscard]] std::uint32_t any_empty() const { return empty_.back(); }
  [[nodiscard]] bool has_empty() const noexcept { return !empty_.empty(); }

  // Relative threshold for a move to count as an improvement.
  [[nodiscard]] double epsilon() const noexcept { return 1e-12 * std::max(1.0, two_m_); }

 private:
  const Level& level_;
  std::vector<std::uint32_t> membership_;
  std::vector<double> total_;
  std::vector<std::uint32_t> count_;
  std::vector<double> link_;
  std::vector<char> seen_;
  std::vector<std::uint32_t> touched_;
  std::vector<std::uint32_t> empty_;
  double resolution_;
  double two_m_;
};

// Renumbers tags densely in first-appearance order; returns the count.
inline std::uint32_t renumber(std::vector<std::uint32_t>& tags) {
  std::vector<std::uint32_t> map(tags.size() + 1, std::numeric_limits<std::uint32_t>::max());
  std::uint32_t next = 0;
  for (auto& t : tags) {
    if (t >= map.size()) map.resize(t + 1, std::numeric_limits<std::uint32_t>::max());
    if (map[t] == std::numeric_limits<std::uint32_t>::max()) map[t] = next++;
    t = map[t];
  }
  return next;
}

inline std::vector<std::uint32_t> shuffled_nodes(std::uint32_t n, std::mt19937_64& rng) {
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

// Louvain local moving: sweep nodes in a shuffled order, moving each to the
// neighboring community with the best strictly positive gain, until a sweep
// moves nothing. Returns whether any node moved.
inline bool louvain_local_moves(const Level& level, std::vector<std::uint32_t>& membership, double resolution,
                                std::mt19937_64& rng) {
  MoveState state(level, membership, resolution);
  const auto order = shuffled_nodes(level.size(), rng);
  bool any = false;
  for (bool moved = true; moved;) {
    moved = false;
    for (const auto v : order) {
      const auto current = state.membership()[v];
      state.gather(v);
      state.remove(v);
      auto best = current;
      double best_gain = state.gain(v, current);
      for (const auto c : state.touched()) {
        const double g = state.gain(v, c);
        if (g > best_gain + state.epsilon()) {
          best = c;
          best_gain = g;
        }
      }
      state.insert(v, best);
      if (best != current) moved = any = true;
    }
  }
  membership.assign(state.membership().begin(), state.membership().end());
  return any;
}

// Leiden fast local moving: a queue seeded with every node in shuffled
// order; after a move, neighbors outside the new community are re-queued.
inline bool leiden_fast_moves(const Level& level, std::vector<std::uint32_t>& membership, double resolution,
                              std::mt19937_64& rng) {
  MoveState state(level, membership, resolution);
  const auto order = shuffled_nodes(level.size(), rng);
  std::deque<std::uint32_t> queue(order.begin(), order.end());
  std::vector<char> queued(level.size(), 1);
  bool any = false;
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop_front();
    queued[v] = 0;
    const auto current = state.membership()[v];
    state.gather(v);
    state.remove(v);
    auto best = current;
    double best_gain = state.gain(v, current);
    for (const auto c : state.touched()) {
      const double g = state.gain(v, c);
      if (g > best_gain + state.epsilon()) {
        best = c;
        best_gain = g;
      }
    }
    // An empty community has gain 0.
    if (best_gain < -state.epsilon() && state.has_empty()) {
      best = state.any_empty();
      best_gain = 0.0;
    }
    state.insert(v, best);
    if (best == current) continue;
    any = true;
    for (const auto& [u, w] : level.adjacency[v]) {
      if (!queued[u] && state.membership()[u] != best) {
        queued[u] = 1;
        queue.push_back(u);
      }
    }
  }
  membership.assign(state.membership().begin(), state.membership().end());
  return any;
}

// Leiden refinement: inside each community of `membership`, start from
// singletons and merge well-connected singleton nodes into well-connected
// refined communities of the same community, choosing the target at random
// with weight exp(gain / randomness) among non-negative gains.
inline std::vector<std::uint32_t> leiden_refine(const Level& level, std::span<const std::uint32_t> membership,
                                                std::uint32_t count, const DetectionConfig& cfg,
                                                std::mt19937_64& rng) {
  const auto n = level.size();
  const double two_m = 2.0 * level.total_weight;
  const double gamma = cfg.resolution;

  std::vector<std::uint32_t> refined(n);
  std::iota(refined.begin(), refined.end(), 0u);
  std::vector<double> r_total(level.strength.begin(), level.strength.end());
  std::vector<std::uint32_t> r_size(n, 1);
  std::vector<double> r_external(n, 0.0);  // E(R, C - R)
  std::vector<double> link(n, 0.0);
  std::vector<std::uint32_t> touched;
  std::vector<double> weights;

  std::vector<std::vector<std::uint32_t>> members(count);
  for (std::uint32_t v = 0; v < n; ++v) members[membership[v]].push_back(v);

  for (auto& community : members) {
    double community_total = 0.0;
    for (const auto v : community) community_total += level.strength[v];
    for (const auto v : community) {
      double inside = 0.0;
      for (const auto& [u, w] : level.adjacency[v]) {
        if (membership[u] == membership[v]) inside += w;
      }
      r_external[v] = inside;
    }

    std::shuffle(community.begin(), community.end(), rng);
    for (const auto v : community) {
      const double kv = level.strength[v];
      // v must be well connected to the rest of its community.
      if (r_external[v] < gamma * kv * (community_total - kv) / two_m) continue;
      if (r_size[refined[v]] != 1) continue;

      for (const auto c : touched) link[c] = 0.0;
      touched.clear();
      for (const auto& [u, w] : level.adjacency[v]) {
        if (membership[u] != membership[v]) continue;
        const auto r = refined[u];
        if (r == refined[v]) continue;
        if (link[r] == 0.0) touched.push_back(r);
        link[r] += w;
      }

      const auto own = refined[v];
      const double own_external = r_external[own];
      r_total[own] -= kv;
      r_size[own] = 0;

      // Candidates: own (now empty) community at gain 0, plus well-connected
      // neighboring refined communities with non-negative gain.
      std::vector<std::pair<std::uint32_t, double>> candidates{{own, 0.0}};
      for (const auto r : touched) {
        if (r_external[r] < gamma * r_total[r] * (community_total - r_total[r]) / two_m) continue;
        const double gain = (link[r] - gamma * kv * r_total[r] / two_m) / level.total_weight;
        if (gain >= 0.0) candidates.emplace_back(r, gain);
      }
      double top = 0.0;
      for (const auto& [r, gain] : candidates) top = std::max(top, gain);
      weights.clear();
      for (const auto& [r, gain] : candidates) weights.push_back(std::exp((gain - top) / cfg.randomness));
      std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
      const auto target = candidates[pick(rng)].first;

      refined[v] = target;
      r_total[target] += kv;
      ++r_size[target];
      if (target == own) {
        r_external[own] = own_external;
      } else {
        r_external[target] += own_external - 2.0 * link[target];
      }
    }
  }
  return refined;
}

inline std::vector<std::uint32_t> flatten(std::span<const std::uint32_t> node_to_level,
                                          std::span<const std::uint32_t> level_membership) {
  std::vector<std::uint32_t> out(node_to_level.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = level_membership[node_to_level[i]];
  return out;
}

// One Leiden run from `start` (membership over the original nodes) until the
// fast local moves leave every aggregate node alone.
inline std::vector<std::uint32_t> leiden_iteration(const Level& base, std::vector<std::uint32_t> start,
                                                   const DetectionConfig& cfg, std::mt19937_64& rng) {
  Level level = base;
  std::vector<std::uint32_t> node_to_level(base.size());
  std::iota(node_to_level.begin(), node_to_level.end(), 0u);
  std::vector<std::uint32_t> membership = std::move(start);
  while (true) {
    leiden_fast_moves(level, membership, cfg.resolution, rng);
    const auto count = renumber(membership);
    if (count == level.size()) break;

    auto refined = leiden_refine(level, membership, count, cfg, rng);
    auto refined_count = renumber(refined);
    if (refined_count == level.size()) {
      // Nothing merged: aggregate on the unrefined communities instead.
      refined = membership;
      refined_count = count;
    }
    std::vector<std::uint32_t> next_membership(refined_count);
    for (std::uint32_t v = 0; v < level.size(); ++v) next_membership[refined[v]] = membership[v];
    for (auto& x : node_to_level) x = refined[x];
    level = level.aggregate(refined, refined_count);
    membership = std::move(next_membership);
  }
  return flatten(node_to_level, membership);
}

}  // namespace detail

/// Louvain: alternate local moving and aggregation until a level makes no
/// move. Node visit order is shuffled with `cfg.seed`. Communities are
/// numbered by descending size.
[[nodiscard]] inline Partition louvain(const WeightedGraph& g, const DetectionConfig& cfg = {}) {
  cfg.validate();
  const auto n = static_cast<std::uint32_t>(g.node_count());
  if (n == 0 || !(g.total_weight() > 0.0)) return Partition::singletons(n);

  std::mt19937_64 rng(cfg.seed);
  auto level = detail::Level::from_graph(g);
  std::vector<std::uint32_t> node_to_level(n);
  std::iota(node_to_level.begin(), node_to_level.end(), 0u);
  for (int pass = 0; pass < cfg.max_passes; ++pass) {
    std::vector<std::uint32_t> membership(level.size());
    std::iota(membership.begin(), membership.end(), 0u);
    if (!detail::louvain_local_moves(level, membership, cfg.resolution, rng)) break;
    const auto count = detail::renumber(membership);
    for (auto& x : node_to_level) x = membership[x];
    if (count == level.size()) break;
    level = level.aggregate(membership, count);
  }
  return Partition(node_to_level).relabeled_by_size();
}

/// Leiden: fast local moving, refinement within communities, aggregation of
/// the refined partition seeded with the unrefined one. Whole iterations
/// repeat from the previous result until the partition is stable or
/// `cfg.max_passes` is reached. Every returned community induces a
/// connected subgraph. Communities are numbered by descending size.
[[nodiscard]] inline Partition leiden(const WeightedGraph& g, const DetectionConfig& cfg = {}) {
  cfg.validate();
  const auto n = static_cast<std::uint32_t>(g.node_count());
  if (n == 0 || !(g.total_weight() > 0.0)) return Partition::singletons(n);

  std::mt19937_64 rng(cfg.seed);
  const auto base = detail::Level::from_graph(g);
  std::vector<std::uint32_t> membership(n);
  std::iota(membership.begin(), membership.end(), 0u);
  for (int pass = 0; pass < cfg.max_passes; ++pass) {
    auto next = detail::leiden_iteration(base, membership, cfg, rng);
    detail::renumber(next);
    const bool stable = next == membership;
    membership = std::move(next);
    if (stable) break;
  }
  return split_disconnected(g, Partition(membership)).relabeled_by_size();
}

[[nodiscard]] inline Partition detect(const WeightedGraph& g, Algorithm algorithm, const DetectionConfig& cfg) {
  return algorithm == Algorithm::kLouvain ? louvain(g, cfg) : leiden(g, cfg);
}

struct DetectionResult {
  Partition partition;
  double modularity = 0.0;
  std::uint64_t seed = 0;  // seed of the winning restart
};

/// Runs `restarts` independent detections with seeds cfg.seed, cfg.seed + 1,
/// ... and keeps the highest modularity; ties go to the earliest seed. The
/// outcome does not depend on `threads`.
[[nodiscard]] inline DetectionResult detect_best(const WeightedGraph& g, Algorithm algorithm,
                                                 const DetectionConfig& cfg, int restarts, unsigned threads = 1) {
  cfg.validate();
  if (restarts < 1) throw UsageError("restarts must be at least 1");
  std::vector<DetectionResult> runs(static_cast<std::size_t>(restarts));
  const bool weighted = g.total_weight() > 0.0;
  auto run = [&](std::size_t i) {
    auto local = cfg;
    local.seed = cfg.seed + i;
    auto p = detect(g, algorithm, local);
    const double q = weighted ? modularity(g, p, cfg.resolution) : 0.0;
    runs[i] = DetectionResult{std::move(p), q, local.seed};
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(restarts)));
  if (threads == 1) {
    for (std::size_t i = 0; i < runs.size(); ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < runs.size();) run(i);
      });
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < runs.size(); ++i) {
    if (runs[i].modularity > runs[best].modularity) best = i;
  }
  return std::move(runs[best]);
}

}  // namespace fieldnet
