#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace melic;

TEST(Distribution, RelativeFrequenciesSortedBySymbol) {
  const std::vector<char> s{'a', 'a', 'b'};
  const auto d = distribution_of<char>(s);
  EXPECT_EQ(d.alphabet, (std::vector<char>{'a', 'b'}));
  EXPECT_DOUBLE_EQ(d.probs[0], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(d.probs[1], 1.0 / 3.0);
  EXPECT_EQ(d.counts, (std::vector<std::size_t>{2, 1}));
  const std::vector<int> same{4, 4, 4};
  EXPECT_EQ(distribution_of<int>(same).size(), 1u);
  EXPECT_THROW(distribution_of<int>(std::vector<int>{}), DegenerateInputError);
}

TEST(Distribution, JointPairsFormProductAlphabet) {
  const auto m = fixtures::melody("m", {60, 62, 60, 62}, {1, 1, 2, 1});
  const auto d = distribution_of(extract_viewpoint(m, ViewpointKind::JointChromaDuration));
  EXPECT_EQ(d.size(), 3u);
}

TEST(Entropy, ClosedForms) {
  EXPECT_DOUBLE_EQ(entropy_of_probs(std::vector<double>{0.25, 0.25, 0.25, 0.25}), 2.0);
  EXPECT_DOUBLE_EQ(entropy_of_probs(std::vector<double>{0.5, 0.25, 0.25}), 1.5);
  EXPECT_EQ(entropy_of_probs(std::vector<double>{1.0}), 0.0);
}

TEST(Entropy, UniformIsLogA) {
  for (std::size_t a = 1; a <= 64; ++a) {
    const std::vector<double> p(a, 1.0 / static_cast<double>(a));
    EXPECT_NEAR(entropy_of_probs(p), std::log2(static_cast<double>(a)), 1e-12);
    EXPECT_NEAR(gini_of_probs(p), 0.0, 1e-12);
  }
}

TEST(Gini, MatchesPairwiseOracle) {
  EXPECT_NEAR(gini_of_probs(std::vector<double>{0.9, 0.05, 0.05}), oracle::gini_pairwise({0.9, 0.05, 0.05}), 1e-12);
  Rng rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> p(1 + rng.below(30));
    double total = 0.0;
    for (double& v : p) total += (v = rng.uniform());
    for (double& v : p) v /= total;
    EXPECT_NEAR(gini_of_probs(p), oracle::gini_pairwise(p), 1e-9);
  }
}

TEST(Gini, RangeAndDegenerate) {
  EXPECT_EQ(gini_of_probs(std::vector<double>{1.0}), 0.0);
  const std::vector<double> extreme{1.0, 0.0, 0.0, 0.0};
  EXPECT_NEAR(gini_of_probs(extreme), 0.75, 1e-15);
}

TEST(MutualInformation, SelfInformationAndNoShuffles) {
  Rng rng(1);
  const std::vector<int> p{0, 1, 2, 0, 1, 2, 2, 2};
  const auto mi = mutual_information_excess<int, int>(p, p, 10, rng);
  EXPECT_NEAR(mi.observed, sequence_entropy<int>(p), 1e-12);
  EXPECT_GT(mi.excess, 0.0);
  const std::vector<int> r{1, 1, 0, 0, 1, 0, 1, 1};
  const auto none = mutual_information_excess<int, int>(p, r, 0, rng);
  EXPECT_EQ(none.shuffled, 0.0);
  EXPECT_EQ(none.excess, none.observed);
}

TEST(MutualInformation, SymmetricBoundedNonnegative) {
  Rng rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<int> a(1 + rng.below(40)), b(a.size());
    for (auto& x : a) x = static_cast<int>(rng.below(5));
    for (auto& x : b) x = static_cast<int>(rng.below(3));
    const double ab = mutual_information<int, int>(a, b);
    EXPECT_NEAR(ab, (mutual_information<int, int>(b, a)), 1e-12);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, std::min(sequence_entropy<int>(a), sequence_entropy<int>(b)) + 1e-12);
  }
}

TEST(MutualInformation, LengthMismatchRejected) {
  Rng rng(1);
  EXPECT_THROW((mutual_information_excess<int, int>(std::vector<int>{1, 2}, std::vector<int>{1}, 1, rng)),
               ParameterError);
}

TEST(MutualInformation, IndependentPairsHaveZeroExcess) {
  Rng rng(2024);
  double total = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> a(50), b(50);
    for (auto& x : a) x = static_cast<int>(rng.below(5));
    for (auto& x : b) x = static_cast<int>(rng.below(5));
    total += mutual_information_excess<int, int>(a, b, 10, rng).excess;
  }
  EXPECT_LT(std::abs(total / 100.0), 0.05);
}

TEST(LowerBound, ClosedFormsAndExhaustiveMinimum) {
  EXPECT_NEAR(entropy_lower_bound(10, 10), std::log2(10.0), 1e-12);
  EXPECT_EQ(entropy_lower_bound(1, 7), 0.0);
  EXPECT_NEAR(entropy_lower_bound(5, 10), oracle::entropy_from_counts({6, 1, 1, 1, 1}), 1e-15);
  for (std::size_t l = 1; l <= 10; ++l) {
    for (std::size_t a = 1; a <= l; ++a) {
      EXPECT_NEAR(entropy_lower_bound(a, l), oracle::min_entropy_over_compositions(a, l), 1e-12);
    }
  }
  EXPECT_THROW(entropy_lower_bound(6, 5), ParameterError);
  EXPECT_THROW(entropy_lower_bound(0, 5), ParameterError);
}

TEST(LowerBound, NeverExceedsObservedEntropy) {
  Rng rng(9);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<int> s(1 + rng.below(12));
    for (auto& x : s) x = static_cast<int>(rng.below(6));
    const auto d = distribution_of<int>(s);
    EXPECT_LE(entropy_lower_bound(d.size(), s.size()), entropy(d) + 1e-12);
  }
}

TEST(PowerLaw, ExponentZeroIsUniform) {
  const auto info = powerlaw_entropy_gini(7, 0.0);
  EXPECT_NEAR(info.entropy_bits, std::log2(7.0), 1e-12);
  EXPECT_NEAR(info.gini, 0.0, 1e-12);
  EXPECT_NEAR(solve_powerlaw_entropy(7, 0.0), std::log2(7.0), 1e-9);
  EXPECT_EQ(solve_powerlaw_entropy(1, 0.0), 0.0);
}

TEST(PowerLaw, HarmonicWeights) {
  std::vector<double> p;
  double z = 0.0;
  for (int i = 1; i <= 7; ++i) z += 1.0 / i;
  for (int i = 1; i <= 7; ++i) p.push_back(1.0 / i / z);
  const auto info = powerlaw_entropy_gini(7, 1.0);
  EXPECT_NEAR(info.entropy_bits, entropy_of_probs(p), 1e-12);
  EXPECT_NEAR(info.gini, oracle::gini_pairwise(p), 1e-12);
}

TEST(PowerLaw, SolveRecoversEntropyAtKnownGini) {
  for (double e : {0.3, 1.0, 2.5}) {
    const auto info = powerlaw_entropy_gini(9, e);
    EXPECT_NEAR(solve_powerlaw_entropy(9, info.gini), info.entropy_bits, 1e-6);
  }
  EXPECT_THROW(solve_powerlaw_entropy(4, 0.75), ParameterError);
  EXPECT_THROW(solve_powerlaw_entropy(4, -0.1), ParameterError);
}

TEST(RatioBounds, Families) {
  const auto bounds = entropy_ratio_bounds(5);
  ASSERT_EQ(bounds.size(), 3u);
  EXPECT_EQ(bounds[0].h_mint, 0.0);
  EXPECT_FALSE(bounds[0].pitch_ratio);
  EXPECT_EQ(bounds[2].pitches, (std::vector<int>{0, 1, 0, 2, 0}));
  EXPECT_NEAR(bounds[2].h_pitch, oracle::entropy_from_counts({3, 1, 1}), 1e-12);
  EXPECT_NEAR(bounds[2].h_mint, oracle::entropy_from_counts({1, 1, 1, 1}), 1e-12);
  EXPECT_THROW(entropy_ratio_bounds(2), ParameterError);
}

TEST(RatioBounds, WaveChromaRatioDecreases) {
  double previous = 1e9;
  for (std::size_t l : {10u, 20u, 40u, 80u}) {
    const auto wave = entropy_ratio_bounds(l)[2];
    ASSERT_TRUE(wave.chroma_ratio);
    EXPECT_LT(*wave.chroma_ratio, previous);
    previous = *wave.chroma_ratio;
  }
}
