#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "fieldnet/backbone.hpp"
#include "fieldnet/report.hpp"
#include "oracles.hpp"

namespace fieldnet {
namespace {

Taxonomy triangle_taxonomy() {
  Taxonomy t;
  t.add("a", "Alpha");
  t.add("b", "Alpha");
  t.add("c", "Beta");
  t.add("d", "Gamma");
  t.add("e", "Delta");
  // f is unclassified
  return t;
}

TEST(CommunityStats, TwoTriangles) {
  const auto g = testing::two_triangles();
  const std::vector<std::uint32_t> tags{0, 0, 0, 1, 1, 1};
  const Partition p(tags);
  const auto rows = community_stats(g, p, betweenness(g), triangle_taxonomy());
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_DOUBLE_EQ(rows[0].density, 1.0);
  EXPECT_DOUBLE_EQ(rows[1].density, 1.0);
  EXPECT_EQ(rows[0].most_central, (std::vector<std::string>{"c"}));
  EXPECT_EQ(rows[1].most_central, (std::vector<std::string>{"d"}));
  EXPECT_EQ(rows[0].dominant_fields, (std::vector<std::string>{"Alpha"}));
  // One vote each for Gamma and Delta; f does not vote.
  EXPECT_EQ(rows[1].dominant_fields, (std::vector<std::string>{"Delta", "Gamma"}));
}

TEST(CommunityStats, SingletonAndTiedCentrality) {
  const auto g = testing::two_triangles();
  const std::vector<std::uint32_t> tags{0, 0, 1, 2, 2, 2};
  const auto rows = community_stats(g, Partition(tags), betweenness(g), triangle_taxonomy());
  EXPECT_EQ(rows[0].most_central, (std::vector<std::string>{"a", "b"}));
  EXPECT_FALSE(rows[1].density_defined);
  EXPECT_EQ(rows[1].density, 0.0);
  std::ostringstream out;
  write_community_stats(out, rows);
  EXPECT_NE(out.str().find("\"a, b\""), std::string::npos);
  EXPECT_NE(out.str().find("(undefined)"), std::string::npos);
}

TEST(CommunityStats, SizesCoverGraphAndDensityMatchesSubgraph) {
  std::mt19937_64 rng(6);
  Taxonomy tax;
  tax.add("n0", "X");
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = testing::random_graph(rng, 20, 0.2);
    if (g.edge_count() == 0) continue;
    DetectionConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(trial);
    const auto p = louvain(g, cfg);
    const auto rows = community_stats(g, p, betweenness(g), tax);
    std::size_t total = 0;
    const auto groups = p.communities();
    for (const auto& r : rows) {
      total += r.size;
      if (r.size >= 2) {
        const auto& members = groups[r.id];
        double inside = 0.0;
        for (const auto& e : g.edges()) {
          if (p[e.u] == r.id && p[e.v] == r.id) inside += 1.0;
        }
        EXPECT_NEAR(r.density, 2.0 * inside / (members.size() * (members.size() - 1.0)), 1e-12);
      }
    }
    EXPECT_EQ(total, g.node_count());
  }
}

TEST(DensityReduction, PercentValues) {
  EXPECT_NEAR(percent_reduction(0.987, 0.744), 24.62, 0.005);
  EXPECT_DOUBLE_EQ(percent_reduction(0.5, 0.25), 50.0);
  EXPECT_THROW((void)percent_reduction(0.0, 0.0), DataError);
}

TEST(DensityReduction, ReportOnFilteredGraph) {
  const auto g = testing::complete_graph(5);
  const auto same = density_reduction_report(g, g);
  EXPECT_EQ(same.percent_reduction, 0.0);

  WeightedGraph half;
  for (const auto& l : g.labels()) half.add_node(l);
  for (std::size_t i = 0; i < g.edge_count(); i += 2) half.add_edge(g.edges()[i].u, g.edges()[i].v, 1.0);
  const auto r = density_reduction_report(g, half);
  EXPECT_EQ(r.edges_before, 10u);
  EXPECT_EQ(r.edges_after, 5u);
  EXPECT_DOUBLE_EQ(r.percent_reduction, 50.0);

  WeightedGraph other;
  other.add_node("x");
  EXPECT_THROW((void)density_reduction_report(g, other), DataError);

  std::ostringstream out;
  write_density_reduction(out, r);
  EXPECT_NE(out.str().find("percent_reduction,50.00"), std::string::npos);
}

TEST(AttributeExport, UnknownFieldAndMissingFrequency) {
  const auto g = testing::two_triangles();
  const std::vector<std::uint32_t> tags{0, 0, 0, 1, 1, 1};
  const Partition p(tags);
  FrequencyTable freq;
  for (const auto& l : g.labels()) freq.counts[l] = 2;
  const auto rows = node_attribute_export(g, betweenness(g), weighted_degree(g), freq, p, triangle_taxonomy());
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0].parent_field, "Alpha");
  EXPECT_EQ(rows[5].parent_field, kUnknownField);
  EXPECT_EQ(rows[2].weighted_degree, 3.0);
  EXPECT_EQ(rows[3].community, 1u);

  freq.counts.erase("e");
  EXPECT_THROW((void)node_attribute_export(g, betweenness(g), weighted_degree(g), freq, p, triangle_taxonomy()),
               DataError);
}

TEST(Formatting, FixedDecimals) {
  EXPECT_EQ(format_fixed(0.74449), "0.7445");
  EXPECT_EQ(format_fixed(24.6201, 2), "24.62");
  EXPECT_EQ(join({"x", "y"}), "x, y");
}

}  // namespace
}  // namespace fieldnet
