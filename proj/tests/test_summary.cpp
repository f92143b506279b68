#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace melic;

TEST(Summary, OneNoteMelody) {
  const auto report = run_summary(std::vector<Corpus>{fixtures::corpus("one", {fixtures::melody("m", {60})})});
  ASSERT_EQ(report.records.size(), 1u);
  const auto& r = report.records[0];
  EXPECT_EQ(r.name, "one");
  EXPECT_EQ(r.h_chroma, 0.0);
  EXPECT_EQ(r.h_dur, 0.0);
  EXPECT_EQ(r.h_chroma_dur, 0.0);
  EXPECT_EQ(r.length, 1.0);
  EXPECT_EQ(r.length_no_repeat, 1.0);
  EXPECT_EQ(r.total_info, 0.0);
  EXPECT_EQ(report.skipped, 0u);
}

TEST(Summary, RowsSortedByCorpusId) {
  std::vector<Corpus> corpora{fixtures::corpus("zeta", {fixtures::melody("a", {60, 62})}),
                              fixtures::corpus("alpha", {fixtures::melody("b", {60, 62, 64, 60, 62, 64})})};
  const auto report = run_summary(corpora);
  ASSERT_EQ(report.records.size(), 2u);
  EXPECT_EQ(report.records[0].name, "alpha");
  EXPECT_EQ(report.records[1].name, "zeta");
  const auto rows = summary_rows(report);
  ASSERT_EQ(rows.size(), 2u);
  std::vector<std::string> keys;
  for (const auto& [k, v] : rows[0]) keys.push_back(k);
  EXPECT_EQ(keys, kSummaryColumns);
}

TEST(Summary, MeansOverMelodies) {
  const Rational h(1, 2);
  // abcabc chroma with constant duration: joint sequence repeats once.
  const auto m1 = fixtures::melody("m1", {60, 62, 64, 60, 62, 64});
  const auto m2 = fixtures::melody("m2", {60, 60}, {1, h});
  const auto report = run_summary(std::vector<Corpus>{fixtures::corpus("c", {m1, m2})});
  const auto& r = report.records[0];
  EXPECT_NEAR(r.h_chroma, 0.5 * std::log2(3.0), 1e-12);
  EXPECT_NEAR(r.h_dur, 0.5, 1e-12);
  EXPECT_NEAR(r.h_chroma_dur, 0.5 * (std::log2(3.0) + 1.0), 1e-12);
  EXPECT_NEAR(r.length, 4.0, 1e-12);
  EXPECT_NEAR(r.length_no_repeat, 0.5 * (3.0 + 2.0), 1e-12);
  EXPECT_NEAR(r.total_info, 0.5 * (3.0 * std::log2(3.0) + 2.0), 1e-12);
}

TEST(Summary, InvalidMelodiesAreSkippedAndCounted) {
  auto bad = fixtures::melody("bad", {60, 62}, {1, 0});
  auto silent = fixtures::melody("silent", {-1, -1});
  const auto good = fixtures::melody("good", {60, 62, 60});
  const auto report = run_summary(std::vector<Corpus>{fixtures::corpus("c", {bad, good, silent})});
  EXPECT_EQ(report.skipped, 2u);
  EXPECT_EQ(report.records[0].n_melodies, 1u);
  EXPECT_EQ(report.records[0].n_skipped, 2u);
  EXPECT_EQ(report.warnings.size(), 2u);
  const auto clean = run_summary(std::vector<Corpus>{fixtures::corpus("c", {good})});
  EXPECT_EQ(clean.records[0].h_chroma, report.records[0].h_chroma);
  EXPECT_EQ(clean.records[0].total_info, report.records[0].total_info);
}

TEST(CorpusMeans, DeterministicAndWellFormed) {
  std::vector<Melody> ms;
  Rng rng(2);
  for (int i = 0; i < 5; ++i) {
    std::vector<int> p;
    std::vector<Rational> d;
    for (int k = 0; k < 30; ++k) {
      p.push_back(60 + static_cast<int>(rng.below(7)));
      d.push_back(Rational(1 + static_cast<int>(rng.below(3)), 2));
    }
    ms.push_back(fixtures::melody("m" + std::to_string(i), p, d));
  }
  const auto c = fixtures::corpus("c", ms, CorpusType::Art, "EU");
  const auto a = corpus_means(c, 10, 4);
  const auto b = corpus_means(c, 10, 4);
  EXPECT_EQ(a.i_star, b.i_star);
  EXPECT_EQ(a.type, "Art");
  EXPECT_EQ(a.region, "EU");
  EXPECT_GT(a.i_chroma_duration, 0.0);
  EXPECT_LE(a.joint_entropy(), a.h_chroma + a.h_duration);
  EXPECT_FALSE(corpus_means(c, 0, 4).i_star.has_value());
}
