#include <random>

#include <gtest/gtest.h>

#include "fieldnet/community.hpp"
#include "oracles.hpp"

namespace fieldnet {

void PrintTo(Algorithm a, std::ostream* os) { *os << to_string(a); }

namespace {

Partition triangles_split() {
  const std::vector<std::uint32_t> tags{0, 0, 0, 1, 1, 1};
  return Partition(tags);
}

TEST(Modularity, TwoTrianglesHandValue) {
  const auto g = testing::two_triangles();
  // in = 3/7 each, tot = 7/14 each: 2 * (3/7 - 1/4) = 5/14.
  EXPECT_NEAR(modularity(g, triangles_split()), 5.0 / 14.0, 1e-12);
  const auto best = testing::exhaustive_best_partition(g);
  EXPECT_NEAR(best.modularity, 5.0 / 14.0, 1e-12);
  EXPECT_EQ(best.optima, 1);
  const auto split = triangles_split();
  EXPECT_TRUE(testing::same_grouping(best.membership, split.membership()));
}

TEST(Modularity, SingletonsAreNegativeAndWholeGraphIsZero) {
  const auto g = testing::complete_graph(4);
  EXPECT_LT(modularity(g, Partition::singletons(4)), 0.0);
  const std::vector<std::uint32_t> one(4, 0);
  EXPECT_NEAR(modularity(g, Partition(one)), 0.0, 1e-15);
}

TEST(Modularity, CommunitySumMatchesPairwiseForm) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = testing::random_graph(rng, 12, 0.35, 9);
    if (g.edge_count() == 0) continue;
    std::uniform_int_distribution<std::uint32_t> pick(0, 3);
    std::vector<std::uint32_t> tags(g.node_count());
    for (auto& t : tags) t = pick(rng);
    const Partition p(tags);
    for (const double gamma : {0.5, 1.0, 2.0}) {
      EXPECT_NEAR(modularity(g, p, gamma), testing::pairwise_modularity(g, p.membership(), gamma), 1e-9);
    }
  }
}

TEST(Modularity, RejectsEdgelessGraphAndMismatchedPartition) {
  WeightedGraph g;
  g.add_node("a");
  g.add_node("b");
  EXPECT_THROW((void)modularity(g, Partition::singletons(2)), DataError);
  EXPECT_THROW((void)modularity(testing::two_triangles(), Partition::singletons(3)), DataError);
}

TEST(Partition, RenumbersAndRelabels) {
  const std::vector<std::uint32_t> tags{7, 7, 3, 9, 3, 3};
  const Partition p(tags);
  EXPECT_EQ(p.community_count(), 3u);
  EXPECT_EQ(std::vector<std::uint32_t>(p.membership().begin(), p.membership().end()),
            (std::vector<std::uint32_t>{0, 0, 1, 2, 1, 1}));
  const auto r = p.relabeled_by_size();
  EXPECT_EQ(r.sizes(), (std::vector<std::size_t>{3, 2, 1}));
  EXPECT_TRUE(testing::same_grouping(p.membership(), r.membership()));
  const std::vector<std::uint32_t> gap{0, 2};
  EXPECT_THROW((void)Partition::from_dense(gap), DataError);
}

TEST(SplitDisconnected, SeparatesComponents) {
  const auto g = testing::two_triangles();
  const std::vector<std::uint32_t> tags{0, 0, 1, 1, 0, 0};  // {a,b,e,f} is not connected
  const auto s = split_disconnected(g, Partition(tags));
  EXPECT_EQ(s.community_count(), 3u);
  EXPECT_GE(modularity(g, s), modularity(g, Partition(tags)) - 1e-12);
}

class Detection : public ::testing::TestWithParam<Algorithm> {};

TEST_P(Detection, RecoversTwoTriangles) {
  const auto g = testing::two_triangles();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    DetectionConfig cfg;
    cfg.seed = seed;
    const auto p = detect(g, GetParam(), cfg);
    EXPECT_TRUE(testing::same_grouping(p.membership(), triangles_split().membership()));
    EXPECT_NEAR(modularity(g, p), 5.0 / 14.0, 1e-12);
  }
}

TEST_P(Detection, CompleteGraphIsOneCommunity) {
  const auto p = detect(testing::complete_graph(4), GetParam(), DetectionConfig{});
  EXPECT_EQ(p.community_count(), 1u);
}

TEST_P(Detection, DeterministicForFixedSeed) {
  std::mt19937_64 rng(4);
  const auto g = testing::random_graph(rng, 40, 0.12);
  DetectionConfig cfg;
  cfg.seed = 17;
  EXPECT_EQ(detect(g, GetParam(), cfg), detect(g, GetParam(), cfg));
}

TEST_P(Detection, NeverWorseThanSingletonsAndSortedBySize) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = testing::random_graph(rng, 25, 0.15);
    if (g.edge_count() == 0) continue;
    DetectionConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(trial);
    const auto p = detect(g, GetParam(), cfg);
    EXPECT_GE(modularity(g, p), modularity(g, Partition::singletons(g.node_count())) - 1e-12);
    const auto sizes = p.sizes();
    EXPECT_TRUE(std::is_sorted(sizes.rbegin(), sizes.rend()));
    std::size_t total = 0;
    for (const auto s : sizes) total += s;
    EXPECT_EQ(total, g.node_count());
  }
}

TEST_P(Detection, CloseToExhaustiveOptimumOnSmallGraphs) {
  std::mt19937_64 rng(2024);
  int exact = 0, trials = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const auto g = testing::random_graph(rng, 8, 0.4);
    if (g.edge_count() == 0) continue;
    ++trials;
    const auto best = testing::exhaustive_best_partition(g);
    DetectionConfig cfg;
    const auto r = detect_best(g, GetParam(), cfg, 10);
    EXPECT_LE(r.modularity, best.modularity + 1e-9);
    if (r.modularity >= best.modularity - 1e-9) ++exact;
  }
  EXPECT_GE(exact * 10, trials * 8);
}

TEST_P(Detection, BestOfRestartsIgnoresThreadCount) {
  std::mt19937_64 rng(3);
  const auto g = testing::random_graph(rng, 60, 0.08);
  DetectionConfig cfg;
  const auto a = detect_best(g, GetParam(), cfg, 12, 1);
  const auto b = detect_best(g, GetParam(), cfg, 12, 6);
  EXPECT_EQ(a.partition, b.partition);
  EXPECT_EQ(a.seed, b.seed);
  EXPECT_EQ(a.modularity, b.modularity);
}

INSTANTIATE_TEST_SUITE_P(Algorithms, Detection, ::testing::Values(Algorithm::kLouvain, Algorithm::kLeiden),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Leiden, CommunitiesAreConnected) {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = testing::random_graph(rng, 30, 0.08);
    if (g.edge_count() == 0) continue;
    DetectionConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(trial);
    const auto p = leiden(g, cfg);
    for (const auto& members : p.communities()) {
      EXPECT_TRUE(is_connected(induced_subgraph(g, members)));
    }
  }
}

TEST(DetectionConfig, RejectsBadValues) {
  const auto g = testing::two_triangles();
  DetectionConfig cfg;
  cfg.resolution = 0.0;
  EXPECT_THROW((void)detect_best(g, Algorithm::kLouvain, cfg, 1), UsageError);
  EXPECT_THROW((void)detect_best(g, Algorithm::kLeiden, DetectionConfig{}, 0), UsageError);
  EXPECT_THROW((void)parse_algorithm("infomap"), UsageError);
}

}  // namespace
}  // namespace fieldnet
