#include <algorithm>
#include <set>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "fieldnet/ingest.hpp"

namespace fieldnet {
namespace {

ParseResult parse(const std::string& text, char delimiter = ',') {
  std::istringstream in(text);
  return parse_records(in, csv::Format{delimiter});
}

TEST(ParseRecords, PipeDelimitedConferenceRows) {
  const auto r = parse(
      "Conference | CS Fields | Paper\n"
      "CHI22 | Security and privacy/ Human-centered computing | Understanding Privacy Switching Behaviour on Twitter\n"
      "KDD22 | Computing methodologies/ Mathematics of computing | TARNet: Task-Aware Reconstruction for "
      "Time-Series Transformer\n",
      '|');
  ASSERT_TRUE(r.rejected.empty());
  ASSERT_EQ(r.records.size(), 2u);
  EXPECT_EQ(r.records[0].conference, "CHI22");
  EXPECT_EQ(r.records[0].labels, (std::vector<std::string>{"Security and privacy", "Human-centered computing"}));
  EXPECT_EQ(r.records[0].title, "Understanding Privacy Switching Behaviour on Twitter");
  EXPECT_EQ(r.records[1].labels, (std::vector<std::string>{"Computing methodologies", "Mathematics of computing"}));
}

TEST(ParseRecords, SingleLabelAndQuotedTitle) {
  const auto r = parse(
      "conference,labels,title\n"
      "ISCA22,Hardware,\"Chips, caches, and more\"\n");
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.records[0].labels, std::vector<std::string>{"Hardware"});
  EXPECT_EQ(r.records[0].title, "Chips, caches, and more");
}

TEST(ParseRecords, CanonicalizesAndDeduplicatesLabels) {
  const auto r = parse(
      "conference,labels,title\n"
      "SIGMOD22,  Information   systems /Information systems/World Wide Web ,t\n");
  ASSERT_EQ(r.records.size(), 1u);
  EXPECT_EQ(r.records[0].labels, (std::vector<std::string>{"Information systems", "World Wide Web"}));
}

TEST(ParseRecords, ReportsMalformedAndEmptyLabelRows) {
  const auto r = parse(
      "conference,labels,title\n"
      "CHI22,Human-centered computing,ok\n"
      "CHI22,too,many,columns\n"
      "CHI22, / ,no labels\n"
      "\n"
      "STOC22,Theory of computation,fine\n");
  EXPECT_EQ(r.records.size(), 2u);
  ASSERT_EQ(r.rejected.size(), 2u);
  EXPECT_EQ(r.rejected[0].line, 3u);
  EXPECT_NE(r.rejected[0].reason.find("columns"), std::string::npos);
  EXPECT_EQ(r.rejected[1].line, 4u);
  EXPECT_EQ(r.rejected[1].reason, "empty label field");
}

TEST(ParseRecords, UnreadableStreamIsFatal) {
  std::istringstream in("x");
  in.setstate(std::ios::badbit);
  EXPECT_THROW((void)parse_records(in), IoError);
}

TEST(BuildCooccurrence, CountsPapersPerPair) {
  const std::vector<PaperRecord> two{{"c", "t1", {"A", "B"}}, {"c", "t2", {"A", "B"}}};
  const auto g = build_cooccurrence(two);
  EXPECT_EQ(g.weight(g.id_of("A"), g.id_of("B")), 2.0);

  const std::vector<PaperRecord> tri{{"c", "t", {"A", "B", "C"}}};
  const auto t = build_cooccurrence(tri);
  EXPECT_EQ(t.edge_count(), 3u);
  for (const auto& e : t.edges()) EXPECT_EQ(e.weight, 1.0);

  const std::vector<PaperRecord> lone{{"c", "t", {"Hardware"}}};
  const auto l = build_cooccurrence(lone);
  EXPECT_EQ(l.node_count(), 1u);
  EXPECT_EQ(l.edge_count(), 0u);
  EXPECT_TRUE(l.frozen());
}

TEST(BuildCooccurrence, MatchesBruteForceRecount) {
  std::mt19937_64 rng(3);
  const std::vector<std::string> labels{"A", "B", "C", "D", "E", "F", "G"};
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<PaperRecord> records;
    std::uniform_int_distribution<int> count(1, 4);
    std::uniform_int_distribution<std::size_t> pick(0, labels.size() - 1);
    for (int i = 0; i < 40; ++i) {
      PaperRecord r{"c", "t" + std::to_string(i), {}};
      const int k = count(rng);
      for (int j = 0; j < k; ++j) {
        const auto& l = labels[pick(rng)];
        if (std::find(r.labels.begin(), r.labels.end(), l) == r.labels.end()) r.labels.push_back(l);
      }
      records.push_back(r);
    }
    const auto g = build_cooccurrence(records);

    std::set<std::string> distinct;
    double pair_total = 0.0;
    for (const auto& r : records) {
      distinct.insert(r.labels.begin(), r.labels.end());
      pair_total += static_cast<double>(r.labels.size() * (r.labels.size() - 1) / 2);
    }
    EXPECT_EQ(g.node_count(), distinct.size());
    EXPECT_DOUBLE_EQ(g.total_weight(), pair_total);
    for (const auto& e : g.edges()) {
      const auto& a = g.label(e.u);
      const auto& b = g.label(e.v);
      std::size_t both = 0;
      for (const auto& r : records) {
        const bool has_a = std::find(r.labels.begin(), r.labels.end(), a) != r.labels.end();
        const bool has_b = std::find(r.labels.begin(), r.labels.end(), b) != r.labels.end();
        both += has_a && has_b;
      }
      EXPECT_EQ(e.weight, static_cast<double>(both));
    }
  }
}

TEST(LabelFrequency, CountsEachPaperOnce) {
  const std::vector<PaperRecord> records{{"c", "1", {"A", "B"}}, {"c", "2", {"A"}}, {"c", "3", {"A", "A"}}};
  const auto f = label_frequency(records);
  EXPECT_EQ(f.count("A"), 3u);
  EXPECT_EQ(f.count("B"), 1u);
  EXPECT_EQ(f.count("Z"), 0u);
  EXPECT_EQ(f.ranked().front().first, "A");
}

TEST(ClassificationCoverage, ComputesFromCounts) {
  // 2083 / 2095 is 99.4272...%, not the 98.95% sometimes quoted with it.
  EXPECT_NEAR(classification_coverage(2083, 2095), 99.42720763723151, 1e-9);
  EXPECT_DOUBLE_EQ(classification_coverage(0, 10), 0.0);
  EXPECT_DOUBLE_EQ(classification_coverage(10, 10), 100.0);
  EXPECT_THROW((void)classification_coverage(0, 0), DataError);
  EXPECT_THROW((void)classification_coverage(11, 10), DataError);
}

TEST(Taxonomy, LoadsAndResolvesParents) {
  std::istringstream in(
      "subfield,field\n"
      "Machine learning,Computing methodologies\n"
      "Human computer interaction (HCI),Human-centered computing\n"
      "Artificial intelligence,Computing methodologies\n"
      "Machine learning,Computing methodologies\n");
  const auto t = load_taxonomy(in);
  EXPECT_EQ(t.parent("Machine learning"), "Computing methodologies");
  EXPECT_EQ(t.parent("Human computer interaction (HCI)"), "Human-centered computing");
  EXPECT_EQ(t.parent("Quantum basket weaving"), std::nullopt);
  EXPECT_EQ(t.size(), 3u);
  EXPECT_EQ(t.fields().size(), 2u);
}

TEST(Taxonomy, RejectsConflictsAndEmptyFiles) {
  std::istringstream conflict("subfield,field\nMachine learning,Computing methodologies\nMachine learning,Hardware\n");
  EXPECT_THROW((void)load_taxonomy(conflict), DataError);
  std::istringstream empty("subfield,field\n");
  EXPECT_THROW((void)load_taxonomy(empty), DataError);
  std::istringstream nothing("");
  EXPECT_THROW((void)load_taxonomy(nothing), DataError);
}

}  // namespace
}  // namespace fieldnet
