#pragma once

// Independent reference computations used only by tests. None of these
// share code paths with the library algorithms they check.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fieldnet/community.hpp"
#include "fieldnet/graph.hpp"

namespace fieldnet::testing {

/// Dense symmetric weight matrix of `g` (0 = no edge).
inline std::vector<std::vector<double>> weight_matrix(const WeightedGraph& g) {
  const auto n = g.node_count();
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (const auto& e : g.edges()) {
    a[e.u.value][e.v.value] = e.weight;
    a[e.v.value][e.u.value] = e.weight;
  }
  return a;
}

/// Betweenness by listing every simple path of every unordered pair,
/// keeping the shortest ones and counting how many pass through each node.
inline std::vector<double> brute_force_betweenness(const WeightedGraph& g, bool weighted) {
  const auto n = g.node_count();
  const auto a = weight_matrix(g);
  std::vector<double> score(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = s + 1; t < n; ++t) {
      std::vector<std::pair<double, std::vector<std::size_t>>> paths;
      std::vector<std::size_t> path{s};
      std::vector<char> on_path(n, 0);
      on_path[s] = 1;
      std::function<void(std::size_t, double)> dfs = [&](std::size_t v, double length) {
        if (v == t) {
          paths.emplace_back(length, path);
          return;
        }
        for (std::size_t w = 0; w < n; ++w) {
          if (a[v][w] == 0.0 || on_path[w]) continue;
          on_path[w] = 1;
          path.push_back(w);
          dfs(w, length + (weighted ? 1.0 / a[v][w] : 1.0));
          path.pop_back();
          on_path[w] = 0;
        }
      };
      dfs(s, 0.0);
      if (paths.empty()) continue;
      double shortest = paths.front().first;
      for (const auto& p : paths) shortest = std::min(shortest, p.first);
      const double tol = 1e-9 * std::max(1.0, shortest);
      double total = 0.0;
      std::vector<double> through(n, 0.0);
      for (const auto& [length, nodes] : paths) {
        if (length > shortest + tol) continue;
        total += 1.0;
        for (std::size_t i = 1; i + 1 < nodes.size(); ++i) through[nodes[i]] += 1.0;
      }
      for (std::size_t u = 0; u < n; ++u) score[u] += through[u] / total;
    }
  }
  return score;
}

/// Modularity as the double sum over ordered node pairs:
/// Q = 1/(2m) * sum_ij [A_ij - gamma k_i k_j / (2m)] * [c_i == c_j].
inline double pairwise_modularity(const WeightedGraph& g, std::span<const std::uint32_t> membership,
                                  double gamma = 1.0) {
  const auto n = g.node_count();
  const auto a = weight_matrix(g);
  std::vector<double> k(n, 0.0);
  double two_m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) k[i] += a[i][j];
    two_m += k[i];
  }
  double q = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (membership[i] == membership[j]) q += a[i][j] - gamma * k[i] * k[j] / two_m;
    }
  }
  return q / two_m;
}

struct BestPartition {
  double modularity = -1.0;
  std::vector<std::uint32_t> membership;
  int optima = 0;  // number of partitions reaching the maximum (within 1e-12)
};

/// Maximum modularity over every set partition (restricted growth strings).
inline BestPartition exhaustive_best_partition(const WeightedGraph& g, double gamma = 1.0) {
  const auto n = g.node_count();
  BestPartition best;
  std::vector<std::uint32_t> rgs(n, 0);
  std::function<void(std::size_t, std::uint32_t)> rec = [&](std::size_t i, std::uint32_t max_used) {
    if (i == n) {
      const double q = pairwise_modularity(g, rgs, gamma);
      if (q > best.modularity + 1e-12) {
        best.modularity = q;
        best.membership = rgs;
        best.optima = 1;
      } else if (std::abs(q - best.modularity) <= 1e-12) {
        ++best.optima;
      }
      return;
    }
    for (std::uint32_t c = 0; c <= max_used + 1; ++c) {
      rgs[i] = c;
      rec(i + 1, std::max(max_used, c));
    }
  };
  if (n == 0) return best;
  rgs[0] = 0;
  rec(1, 0);
  return best;
}

/// True when both memberships group the nodes identically.
inline bool same_grouping(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a.size(); ++j) {
      if ((a[i] == a[j]) != (b[i] == b[j])) return false;
    }
  }
  return true;
}

/// Erdos-Renyi style graph with `n` nodes, edge probability `p` and integer
/// weights in [1, max_weight].
inline WeightedGraph random_graph(std::mt19937_64& rng, std::size_t n, double p, int max_weight = 5) {
  WeightedGraph g;
  for (std::size_t i = 0; i < n; ++i) g.add_node("n" + std::to_string(i));
  std::bernoulli_distribution coin(p);
  std::uniform_int_distribution<int> weight(1, max_weight);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) {
      if (coin(rng)) g.add_edge(NodeId{i}, NodeId{j}, static_cast<double>(weight(rng)));
    }
  }
  g.freeze();
  return g;
}

/// Two unit-weight triangles {a,b,c} and {d,e,f} joined by the edge c-d.
inline WeightedGraph two_triangles() {
  WeightedGraph g;
  for (const char* l : {"a", "b", "c", "d", "e", "f"}) g.add_node(l);
  auto e = [&](const char* x, const char* y) { g.add_edge(g.id_of(x), g.id_of(y), 1.0); };
  e("a", "b");
  e("b", "c");
  e("a", "c");
  e("d", "e");
  e("e", "f");
  e("d", "f");
  e("c", "d");
  g.freeze();
  return g;
}

inline WeightedGraph complete_graph(std::size_t n, double w = 1.0) {
  WeightedGraph g;
  for (std::size_t i = 0; i < n; ++i) g.add_node("k" + std::to_string(i));
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) g.add_edge(NodeId{i}, NodeId{j}, w);
  }
  g.freeze();
  return g;
}

}  // namespace fieldnet::testing
