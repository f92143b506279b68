#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "fixtures.hpp"

using namespace melic;

namespace {

std::vector<char> chars(const std::string& s) { return {s.begin(), s.end()}; }

std::vector<Symbol> random_symbols(Rng& rng, std::size_t n, std::size_t a) {
  std::vector<Symbol> s;
  for (std::size_t i = 0; i < n; ++i) s.emplace_back(static_cast<std::int64_t>(rng.below(a)));
  return s;
}

}  // namespace

TEST(Ppm, CountsAllNgramsUpToOrder) {
  PpmModel<char> model(2, {'a', 'b'});
  model.train(chars("abab"));
  const auto* ab = model.counts(chars("ab"));
  ASSERT_NE(ab, nullptr);
  EXPECT_EQ(*ab, (PpmModel<char>::CountTable{{0, 1}}));
  const auto* ba = model.counts(chars("ba"));
  ASSERT_NE(ba, nullptr);
  EXPECT_EQ(*ba, (PpmModel<char>::CountTable{{1, 1}}));
  const auto* unigram = model.counts(std::vector<char>{});
  ASSERT_NE(unigram, nullptr);
  EXPECT_EQ(*unigram, (PpmModel<char>::CountTable{{0, 2}, {1, 2}}));
  EXPECT_EQ(model.counts(chars("aa")), nullptr);
}

TEST(Ppm, OrderZeroIsUnigram) {
  PpmModel<char> model(0, {'a', 'b', 'c'});
  model.train(chars("aab"));
  const auto p = model.predict(chars("bbbb"));
  // 'c' unseen: escape mass 2/5 goes to it alone.
  EXPECT_NEAR(p[0], 2.0 / 5.0, 1e-15);
  EXPECT_NEAR(p[1], 1.0 / 5.0, 1e-15);
  EXPECT_NEAR(p[2], 2.0 / 5.0, 1e-15);
}

TEST(Ppm, UntrainedModelIsUniform) {
  PpmModel<char> model(3, {'a', 'b', 'c', 'd', 'e'});
  const auto ic = information_content<char>(model, chars("abcdeedcba"));
  for (double b : ic.per_symbol_bits) EXPECT_NEAR(b, std::log2(5.0), 1e-12);
  EXPECT_NEAR(ic.mean_bits, std::log2(5.0), 1e-12);
}

TEST(Ppm, EscapeArithmeticByHand) {
  std::string train;
  for (int i = 0; i < 50; ++i) train += "ab";
  PpmModel<char> first_order(1, {'a', 'b'});
  first_order.train(chars(train));
  const auto probs = first_order.sequence_probabilities(chars("ababab"));
  // Context "a" has only ever been followed by b (50 times): 50 / (50 + 1).
  EXPECT_NEAR(probs[1], 50.0 / 51.0, 1e-12);
  EXPECT_NEAR(probs[3], 50.0 / 51.0, 1e-12);
  // Empty context has seen both letters, so no escape is reserved.
  EXPECT_NEAR(probs[0], 0.5, 1e-12);
  const auto ic = information_content<char>(first_order, chars("ababab"));
  EXPECT_NEAR(ic.per_symbol_bits[1], -std::log2(50.0 / 51.0), 1e-12);

  PpmModel<char> fifth_order(5, {'a', 'b'});
  fifth_order.train(chars(train));
  const auto deep = fifth_order.sequence_probabilities(chars("ababab"));
  EXPECT_NEAR(deep[1], 50.0 / 51.0, 1e-12);  // context "a"
  EXPECT_NEAR(deep[3], 49.0 / 50.0, 1e-12);  // context "aba"
  EXPECT_NEAR(deep[5], 48.0 / 49.0, 1e-12);  // context "ababa"
}

TEST(Ppm, ManyCopiesDriveInformationTowardFloor) {
  // Without a start marker the first symbol and the symbol after the opening
  // "ab" stay ambiguous (a/b/c/d/e and c/d/e): the floor is 2 log2(3) / 9.
  const auto s = chars("abcabdabe");
  double previous = 1e9;
  ICResult last;
  for (int copies : {1, 10, 100, 1000}) {
    PpmModel<char> model(5, {'a', 'b', 'c', 'd', 'e'});
    for (int k = 0; k < copies; ++k) model.train(s);
    last = information_content<char>(model, s);
    EXPECT_LT(last.mean_bits, previous);
    previous = last.mean_bits;
  }
  EXPECT_NEAR(previous, 2.0 * std::log2(3.0) / 9.0, 0.01);
  for (std::size_t i : {1u, 3u, 4u, 5u, 6u, 7u, 8u}) EXPECT_LT(last.per_symbol_bits[i], 0.01) << i;
}

TEST(Ppm, ProbabilitiesSumToOne) {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t a = 1 + rng.below(8);
    std::set<Symbol> alphabet;
    for (std::size_t i = 0; i < a; ++i) alphabet.insert(Symbol{static_cast<std::int64_t>(i)});
    PpmModel<Symbol> model(rng.below(6), alphabet);
    for (std::size_t k = rng.below(6); k > 0; --k) model.train(random_symbols(rng, 1 + rng.below(30), a));
    const auto probe = random_symbols(rng, 20, a);
    for (std::size_t i = 0; i <= probe.size(); ++i) {
      const auto p = model.predict(std::span<const Symbol>(probe.data(), i));
      EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-9);
      for (double v : p) EXPECT_GT(v, 0.0);
    }
  }
}

TEST(Ppm, SymbolOutsideAlphabetRejected) {
  PpmModel<char> model(2, {'a', 'b'});
  EXPECT_THROW(model.train(chars("abc")), ValidationError);
  EXPECT_THROW(information_content<char>(model, chars("z")), ValidationError);
  EXPECT_THROW(PpmModel<char>(2, {}), ParameterError);
}

namespace {

WithinCorpusOptions fast_options() {
  WithinCorpusOptions opt;
  opt.kind = ViewpointKind::Pitch;
  opt.n_shuffle_reps = 5;
  return opt;
}

}  // namespace

TEST(WithinCorpus, IdenticalMelodiesAreLearnable) {
  std::vector<Melody> melodies;
  for (int i = 0; i < 20; ++i) {
    melodies.push_back(fixtures::melody("m" + std::to_string(i),
                                        {60, 62, 64, 65, 67, 65, 64, 62, 60, 67, 64, 60, 62, 62, 65, 69, 67}));
  }
  const auto r = within_corpus_repetition(fixtures::corpus("same", melodies), fast_options(), 12);
  EXPECT_GT(r.repetition_bits, 1.0);
  EXPECT_EQ(r.targets.size(), 20u);
}

TEST(WithinCorpus, IidMelodiesCarryNoSharedStructure) {
  Rng rng(99);
  std::vector<std::string> ids;
  std::vector<std::vector<Symbol>> seqs;
  for (int i = 0; i < 50; ++i) {
    ids.push_back("r" + std::to_string(i));
    seqs.push_back(random_symbols(rng, 50, 5));
  }
  WithinCorpusOptions opt;
  const auto r = within_corpus_repetition_sequences(ids, seqs, opt, 2024);
  EXPECT_LT(std::abs(r.repetition_bits), 0.1);
}

TEST(WithinCorpus, TooFewMelodiesNamesCorpus) {
  std::vector<Melody> melodies;
  for (int i = 0; i < 5; ++i) melodies.push_back(fixtures::melody("m" + std::to_string(i), {60, 62, 64}));
  try {
    within_corpus_repetition(fixtures::corpus("tiny", melodies), fast_options(), 1);
    FAIL();
  } catch (const ParameterError& e) {
    EXPECT_NE(std::string(e.what()).find("tiny"), std::string::npos);
  }
}

TEST(WithinCorpus, IndependentOfMelodyOrderAndThreads) {
  Rng rng(5);
  std::vector<Melody> melodies;
  for (int i = 0; i < 15; ++i) {
    std::vector<int> p;
    for (int k = 0; k < 30; ++k) p.push_back(55 + static_cast<int>(rng.below(12)));
    melodies.push_back(fixtures::melody("m" + std::to_string(i), p));
  }
  WithinCorpusOptions opt = fast_options();
  opt.kind = ViewpointKind::MInt;
  const auto base = within_corpus_repetition(fixtures::corpus("c", melodies), opt, 8);
  auto reversed = melodies;
  std::reverse(reversed.begin(), reversed.end());
  opt.threads = 4;
  const auto other = within_corpus_repetition(fixtures::corpus("c", reversed), opt, 8);
  EXPECT_NEAR(base.repetition_bits, other.repetition_bits, 1e-12);
  for (const auto& t : base.targets) {
    const auto it = std::find_if(other.targets.begin(), other.targets.end(),
                                 [&](const TargetRepetition& o) { return o.melody_id == t.melody_id; });
    ASSERT_NE(it, other.targets.end());
    EXPECT_EQ(it->ic, t.ic);
    EXPECT_EQ(it->ic_shuffled, t.ic_shuffled);
  }
}

TEST(WithinCorpus, InvariantUnderRelabeling) {
  Rng rng(6);
  std::vector<std::string> ids;
  std::vector<std::vector<Symbol>> seqs, relabeled;
  for (int i = 0; i < 14; ++i) {
    ids.push_back("x" + std::to_string(i));
    seqs.push_back(random_symbols(rng, 40, 4));
    std::vector<Symbol> r;
    for (const auto& s : seqs.back()) r.emplace_back(100 - 7 * std::get<std::int64_t>(s));
    relabeled.push_back(r);
  }
  WithinCorpusOptions opt;
  opt.n_shuffle_reps = 3;
  const auto a = within_corpus_repetition_sequences(ids, seqs, opt, 3);
  const auto b = within_corpus_repetition_sequences(ids, relabeled, opt, 3);
  EXPECT_NEAR(a.repetition_bits, b.repetition_bits, 1e-9);
}

TEST(WithinCorpus, StructuredCorpusBeatsShuffledAcrossSettings) {
  Rng rng(8);
  std::vector<int> motif{0, 2, 4, 2, 0, 7, 5, 4, 2, 0};
  std::vector<Melody> melodies;
  for (int i = 0; i < 25; ++i) {
    std::vector<int> p;
    for (int k = 0; k < 4; ++k) {
      for (int v : motif) p.push_back(60 + v + (rng.below(5) == 0 ? 1 : 0));
    }
    melodies.push_back(fixtures::melody("s" + std::to_string(i), p));
  }
  const Corpus c = fixtures::corpus("motif", melodies);
  for (std::size_t n_train : {5u, 10u, 20u}) {
    for (std::size_t truncate : {30u, 50u}) {
      WithinCorpusOptions opt = fast_options();
      opt.kind = ViewpointKind::MInt;
      opt.n_train = n_train;
      opt.truncate = truncate;
      EXPECT_GT(within_corpus_repetition(c, opt, 4).repetition_bits, 0.0) << n_train << "/" << truncate;
    }
  }
}
