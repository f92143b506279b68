#include <gtest/gtest.h>

#include <string>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace melic;

namespace {

std::vector<char> chars(const std::string& s) { return {s.begin(), s.end()}; }

std::size_t total_length(const std::vector<std::vector<char>>& pieces) {
  std::size_t n = 0;
  for (const auto& p : pieces) n += p.size();
  return n;
}

}  // namespace

TEST(Repetition, AbcabcKeepsOneCopy) {
  const auto s = chars("abcabc");
  const auto r = remove_repetition<char>(s, 2);
  EXPECT_EQ(r.l_nr, 3u);
  ASSERT_EQ(r.pieces.size(), 1u);
  EXPECT_EQ(r.pieces[0], chars("abc"));
  ASSERT_EQ(r.removed_matches.size(), 1u);
  EXPECT_EQ(r.removed_matches[0].substring, chars("abc"));
  EXPECT_EQ(r.removed_matches[0].count, 2u);
  EXPECT_DOUBLE_EQ(repetition_fraction<char>(s, 2), 0.5);
}

TEST(Repetition, NoRepeats) {
  const auto s = chars("abcde");
  EXPECT_EQ(remove_repetition<char>(s, 2).l_nr, 5u);
  EXPECT_EQ(repetition_fraction<char>(s, 2), 0.0);
}

TEST(Repetition, RunOfFour) {
  const auto r = remove_repetition<char>(chars("aaaa"), 2);
  EXPECT_EQ(r.l_nr, 2u);
  EXPECT_EQ(r.pieces, std::vector<std::vector<char>>{chars("aa")});
}

TEST(Repetition, OverlappingOccurrencesCountOnce) {
  // "aaa" contains "aa" only once without overlap.
  EXPECT_EQ(remove_repetition<char>(chars("aaab"), 2).l_nr, 4u);
}

TEST(Repetition, MatchLengthCappedAtHalf) {
  // "abcab": "ab" occurs twice; the cap is floor(5/2) = 2.
  const auto r = remove_repetition<char>(chars("abcab"), 2);
  EXPECT_EQ(r.l_nr, 3u);
}

TEST(Repetition, LminValidation) {
  EXPECT_THROW(remove_repetition<char>(chars("abab"), 1), ParameterError);
  EXPECT_THROW(remove_repetition<char>(std::vector<char>{}, 2), DegenerateInputError);
}

TEST(Repetition, MatchesBruteForceOracle) {
  Rng rng(77);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.below(12);
    const std::size_t a = 1 + rng.below(4);
    std::vector<char> s(n);
    for (auto& c : s) c = static_cast<char>('a' + rng.below(a));
    const auto r = remove_repetition<char>(s, 2);
    const auto expected = oracle::remove_repetition_bruteforce(s, 2);
    EXPECT_EQ(r.l_nr, total_length(expected)) << std::string(s.begin(), s.end());
    EXPECT_EQ(r.pieces, expected) << std::string(s.begin(), s.end());
  }
}

TEST(Repetition, FinalPiecesHaveNoRepeat) {
  Rng rng(78);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<int> s(2 + rng.below(60));
    for (auto& c : s) c = static_cast<int>(rng.below(1 + rng.below(6)));
    const auto r = remove_repetition<int>(s, 2);
    const std::size_t cap = s.size() / 2;
    for (const auto& piece : r.pieces) {
      for (std::size_t i = 0; i < piece.size(); ++i) {
        for (std::size_t len = 2; len <= cap && i + len <= piece.size(); ++len) {
          const std::vector<int> sub(piece.begin() + static_cast<std::ptrdiff_t>(i),
                                     piece.begin() + static_cast<std::ptrdiff_t>(i + len));
          std::size_t total = 0;
          for (const auto& q : r.pieces) total += oracle::count_nonoverlapping(q, sub);
          EXPECT_LT(total, 2u);
        }
      }
    }
    EXPECT_GE(r.l_nr, 1u);
    EXPECT_LE(r.l_nr, s.size());
  }
}

TEST(Repetition, RepeatedSubstringsBeforeRemoval) {
  const auto subs = repeated_substrings<char>(chars("abcabc"), 2);
  std::vector<std::string> found;
  for (const auto& s : subs) found.emplace_back(s.substring.begin(), s.substring.end());
  EXPECT_EQ(found, (std::vector<std::string>{"ab", "bc", "abc"}));
}

TEST(Repetition, StructuredInputMoreRepetitiveThanShuffled) {
  Rng rng(4);
  std::vector<int> motif{0, 2, 4, 5, 7, 5, 4, 2};
  std::vector<int> song;
  for (int k = 0; k < 4; ++k) song.insert(song.end(), motif.begin(), motif.end());
  const double structured = repetition_fraction<int>(song, 2);
  double shuffled = 0.0;
  for (int k = 0; k < 200; ++k) {
    auto s = song;
    rng.shuffle(std::span<int>(s));
    shuffled += repetition_fraction<int>(s, 2);
  }
  EXPECT_LE(shuffled / 200.0, structured);
}

TEST(TotalInformation, RepeatedPairGivesZero) {
  const auto t = total_information(fixtures::melody("m", {60, 60, 60, 60}));
  EXPECT_EQ(t.joint_entropy, 0.0);
  EXPECT_EQ(t.total_bits, 0.0);
  EXPECT_EQ(t.length, 4u);
  EXPECT_EQ(t.l_nr, 2u);
}

TEST(TotalInformation, ProductOfJointEntropyAndLnr) {
  const auto m = fixtures::melody("m", {60, 62, 64, 60, 62, 64}, {1, 1, 2, 1, 1, 2});
  const auto t = total_information(m);
  EXPECT_NEAR(t.joint_entropy, std::log2(3.0), 1e-12);
  EXPECT_EQ(t.l_nr, 3u);
  EXPECT_NEAR(t.total_bits, 3.0 * std::log2(3.0), 1e-12);
}
