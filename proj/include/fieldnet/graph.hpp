#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fieldnet/error.hpp"

namespace fieldnet {

/// Handle of a node inside one WeightedGraph. Ids are dense and assigned in
/// insertion order, so `value` doubles as an index into per-node arrays.
struct NodeId {
  std::uint32_t value = 0;

  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

struct Edge {
  NodeId u;  // u < v
  NodeId v;
  double weight = 0.0;
};

struct Neighbor {
  NodeId node;
  double weight = 0.0;
};

/// Undirected, simple, positively weighted graph over string labels.
///
/// The graph is mutable until freeze() is called; afterwards every mutating
/// call throws and the object can be shared across threads for reads.
/// Node and neighbor iteration follow insertion order.
class WeightedGraph {
 public:
  WeightedGraph() = default;

  NodeId add_node(std::string_view label) {
    require_mutable();
    if (label.empty()) throw DataError("node label must not be empty");
    std::string key(label);
    if (auto it = index_.find(key); it != index_.end()) return NodeId{it->second};
    const auto id = static_cast<std::uint32_t>(labels_.size());
    labels_.push_back(key);
    index_.emplace(std::move(key), id);
    adjacency_.emplace_back();
    strength_.push_back(0.0);
    return NodeId{id};
  }

  /// Adds `delta` to the weight of {u, v}, creating the edge when absent.
  double increment_edge(NodeId u, NodeId v, double delta) {
    require_mutable();
    check_pair(u, v);
    if (!(delta > 0.0)) throw DataError("edge weight increment must be positive");
    const auto key = pair_key(u, v);
    if (auto it = edge_index_.find(key); it != edge_index_.end()) {
      auto& e = edges_[it->second];
      e.weight += delta;
      const auto [pos_u, pos_v] = adjacency_slot_[it->second];
      adjacency_[e.u.value][pos_u].weight = e.weight;
      adjacency_[e.v.value][pos_v].weight = e.weight;
      strength_[u.value] += delta;
      strength_[v.value] += delta;
      return e.weight;
    }
    insert_edge(u, v, delta, key);
    return delta;
  }

  /// Inserts a new edge; an existing {u, v} is an error.
  void add_edge(NodeId u, NodeId v, double weight) {
    require_mutable();
    check_pair(u, v);
    if (!(weight > 0.0)) throw DataError("edge weight must be positive");
    const auto key = pair_key(u, v);
    if (edge_index_.contains(key)) {
      throw DataError("duplicate edge: " + labels_[u.value] + " -- " + labels_[v.value]);
    }
    insert_edge(u, v, weight, key);
  }

  void freeze() noexcept { frozen_ = true; }
  [[nodiscard]] bool frozen() const noexcept { return frozen_; }

  [[nodiscard]] std::size_t node_count() const noexcept { return labels_.size(); }
  [[nodiscard]] std::size_t edge_count() const noexcept { return edges_.size(); }

  [[nodiscard]] bool contains(NodeId u) const noexcept { return u.value < labels_.size(); }

  [[nodiscard]] std::optional<NodeId> find(std::string_view label) const {
    if (auto it = index_.find(std::string(label)); it != index_.end()) return NodeId{it->second};
    return std::nullopt;
  }

  [[nodiscard]] NodeId id_of(std::string_view label) const {
    if (auto id = find(label)) return *id;
    throw DataError("unknown node label: " + std::string(label));
  }

  [[nodiscard]] const std::string& label(NodeId u) const {
    check_node(u);
    return labels_[u.value];
  }

  [[nodiscard]] std::span<const std::string> labels() const noexcept { return labels_; }

  /// Weight of {u, v}, or nullopt when there is no such edge.
  [[nodiscard]] std::optional<double> weight(NodeId u, NodeId v) const {
    check_node(u);
    check_node(v);
    if (u == v) return std::nullopt;
    if (auto it = edge_index_.find(pair_key(u, v)); it != edge_index_.end()) {
      return edges_[it->second].weight;
    }
    return std::nullopt;
  }

  [[nodiscard]] bool has_edge(NodeId u, NodeId v) const { return weight(u, v).has_value(); }

  /// Edges in insertion order, each with u < v.
  [[nodiscard]] std::span<const Edge> edges() const noexcept { return edges_; }

  [[nodiscard]] std::span<const Neighbor> neighbors(NodeId u) const {
    check_node(u);
    return adjacency_[u.value];
  }

  [[nodiscard]] std::size_t degree(NodeId u) const { return neighbors(u).size(); }

  /// Sum of incident edge weights.
  [[nodiscard]] double strength(NodeId u) const {
    check_node(u);
    return strength_[u.value];
  }

  [[nodiscard]] double total_weight() const noexcept {
    double total = 0.0;
    for (const auto& e : edges_) total += e.weight;
    return total;
  }

 private:
  static std::uint64_t pair_key(NodeId a, NodeId b) noexcept {
    if (b < a) std::swap(a, b);
    return (static_cast<std::uint64_t>(a.value) << 32) | b.value;
  }

  void require_mutable() const {
    if (frozen_) throw DataError("graph is frozen");
  }

  void check_node(NodeId u) const {
    if (!contains(u)) throw DataError("unknown node id " + std::to_string(u.value));
  }

  void check_pair(NodeId u, NodeId v) const {
    check_node(u);
    check_node(v);
    if (u == v) throw DataError("self-loop on " + labels_[u.value] + " is not allowed");
  }

  void insert_edge(NodeId u, NodeId v, double weight, std::uint64_t key) {
    if (v < u) std::swap(u, v);
    edge_index_.emplace(key, edges_.size());
    edges_.push_back(Edge{u, v, weight});
    adjacency_slot_.emplace_back(adjacency_[u.value].size(), adjacency_[v.value].size());
    adjacency_[u.value].push_back(Neighbor{v, weight});
    adjacency_[v.value].push_back(Neighbor{u, weight});
    strength_[u.value] += weight;
    strength_[v.value] += weight;
  }

  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<Edge> edges_;
  std::unordered_map<std::uint64_t, std::size_t> edge_index_;
  std::vector<std::vector<Neighbor>> adjacency_;
  // Position of each edge inside adjacency_[u] and adjacency_[v].
  std::vector<std::pair<std::size_t, std::size_t>> adjacency_slot_;
  std::vector<double> strength_;
  bool frozen_ = false;
};

/// Unweighted density 2m / (n(n-1)).
[[nodiscard]] inline double density(const WeightedGraph& g) {
  const auto n = static_cast<double>(g.node_count());
  if (g.node_count() < 2) throw DataError("density is undefined for fewer than two nodes");
  return 2.0 * static_cast<double>(g.edge_count()) / (n * (n - 1.0));
}

/// Subgraph on `nodes` with every edge whose endpoints both lie in the set.
/// Nodes keep their relative order from `g`, so the full node set yields a
/// copy of `g`. The result is frozen.
[[nodiscard]] inline WeightedGraph induced_subgraph(const WeightedGraph& g, std::span<const NodeId> nodes) {
  std::vector<char> member(g.node_count(), 0);
  for (const auto u : nodes) {
    if (!g.contains(u)) throw DataError("induced_subgraph: unknown node id " + std::to_string(u.value));
    member[u.value] = 1;
  }
  WeightedGraph sub;
  std::vector<NodeId> remap(g.node_count());
  for (std::uint32_t i = 0; i < g.node_count(); ++i) {
    if (member[i]) remap[i] = sub.add_node(g.label(NodeId{i}));
  }
  for (const auto& e : g.edges()) {
    if (member[e.u.value] && member[e.v.value]) sub.add_edge(remap[e.u.value], remap[e.v.value], e.weight);
  }
  sub.freeze();
  return sub;
}

/// Connected-component id per node (ids follow first appearance in node order).
[[nodiscard]] inline std::vector<std::uint32_t> connected_components(const WeightedGraph& g) {
  constexpr auto kUnset = static_cast<std::uint32_t>(-1);
  std::vector<std::uint32_t> component(g.node_count(), kUnset);
  std::vector<NodeId> stack;
  std::uint32_t next = 0;
  for (std::uint32_t s = 0; s < g.node_count(); ++s) {
    if (component[s] != kUnset) continue;
    component[s] = next;
    stack.push_back(NodeId{s});
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      for (const auto& nb : g.neighbors(u)) {
        if (component[nb.node.value] == kUnset) {
          component[nb.node.value] = next;
          stack.push_back(nb.node);
        }
      }
    }
    ++next;
  }
  return component;
}

/// True when one component spans every node. A single node is connected;
/// the empty graph is not.
[[nodiscard]] inline bool is_connected(const WeightedGraph& g) {
  if (g.node_count() == 0) return false;
  const auto component = connected_components(g);
  for (const auto c : component) {
    if (c != 0) return false;
  }
  return true;
}

}  // namespace fieldnet
