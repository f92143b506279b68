#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "fixtures.hpp"

using namespace melic;

namespace {

const char* kOneMelody = R"({
 "corpus_id": "c1", "type": "Folk", "region": "Ireland", "composer_birth_year": null,
 "melodies": [
  {"id": "m1", "key": 7, "notes": [
    {"pitch": 60, "onset": "0", "duration": "1/4"},
    {"pitch": 60, "onset": "1/4", "duration": "1/4"},
    {"pitch": 60, "onset": "1/2", "duration": "1/4"}
  ]}
 ]
})";

std::string with_note(const std::string& note) {
  return R"({"corpus_id": "c", "type": "Art", "region": "x", "melodies": [{"id": "bad", "notes": [)" + note +
         "]}]}";
}

}  // namespace

TEST(Corpus, ParsesOneMelodyWithExactRationals) {
  const Corpus c = parse_canonical(kOneMelody);
  EXPECT_EQ(c.meta.corpus_id, "c1");
  EXPECT_EQ(c.meta.type, CorpusType::Folk);
  EXPECT_EQ(c.meta.region, "Ireland");
  EXPECT_FALSE(c.meta.composer_birth_year);
  ASSERT_EQ(c.melodies.size(), 1u);
  const Melody& m = c.melodies[0];
  ASSERT_EQ(m.events.size(), 3u);
  EXPECT_EQ(m.key, 7);
  EXPECT_EQ(m.events[1].onset, Rational(1, 4));
  EXPECT_EQ(m.events[2].duration, Rational(1, 4));
  EXPECT_EQ(*m.events[0].pitch, 60);
}

TEST(Corpus, NullPitchIsRest) {
  const Corpus c = parse_canonical(with_note(R"({"pitch": 60, "onset": "0", "duration": "1"},
                                                {"pitch": null, "onset": "1", "duration": "1/2"})"));
  EXPECT_FALSE(c.melodies[0].events[0].is_rest());
  EXPECT_TRUE(c.melodies[0].events[1].is_rest());
  EXPECT_EQ(c.melodies[0].note_count(), 1u);
}

TEST(Corpus, ZeroDurationRejectedNamingMelody) {
  try {
    parse_canonical(with_note(R"({"pitch": 60, "onset": "0", "duration": "0/4"})"));
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("bad"), std::string::npos);
  }
}

TEST(Corpus, NegativeDurationRejected) {
  EXPECT_THROW(parse_canonical(with_note(R"({"pitch": 60, "onset": "0", "duration": "-1/4"})")), ValidationError);
}

TEST(Corpus, DecreasingOnsetRejectedNotReordered) {
  EXPECT_THROW(parse_canonical(with_note(R"({"pitch": 60, "onset": "1", "duration": "1"},
                                             {"pitch": 62, "onset": "0", "duration": "1"})")),
               ValidationError);
}

TEST(Corpus, AllRestMelodyRejected) {
  EXPECT_THROW(parse_canonical(with_note(R"({"pitch": null, "onset": "0", "duration": "1"})")), ValidationError);
}

TEST(Corpus, KeyOutOfRangeRejected) {
  const std::string text = R"({"corpus_id": "c", "type": "Art", "region": "x", "melodies": [
    {"id": "k", "key": 12, "notes": [{"pitch": 60, "onset": "0", "duration": "1"}]}]})";
  EXPECT_THROW(parse_canonical(text), ValidationError);
}

TEST(Corpus, DuplicateIdsAndEmptyCorpusRejected) {
  const std::string dup = R"({"corpus_id": "c", "type": "Art", "region": "x", "melodies": [
    {"id": "a", "notes": [{"pitch": 60, "onset": "0", "duration": "1"}]},
    {"id": "a", "notes": [{"pitch": 62, "onset": "0", "duration": "1"}]}]})";
  EXPECT_THROW(parse_canonical(dup), ValidationError);
  EXPECT_THROW(parse_canonical(R"({"corpus_id": "c", "type": "Art", "region": "x", "melodies": []})"),
               ValidationError);
}

TEST(Corpus, UnknownTypeRejected) {
  EXPECT_THROW(parse_canonical(R"({"corpus_id": "c", "type": "Pop", "region": "x", "melodies": []})"),
               ValidationError);
}

TEST(Corpus, MalformedSyntaxReportsLineAndColumn) {
  const std::string text = "{\n  \"corpus_id\": \"c\",\n  \"type\": ,\n}";
  try {
    parse_canonical(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.column(), 11u);
  }
}

TEST(Corpus, RoundTripIsIdentity) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Melody> melodies;
    const std::size_t n_mel = 1 + rng.below(4);
    for (std::size_t k = 0; k < n_mel; ++k) {
      Melody m;
      m.id = "m" + std::to_string(k);
      if (rng.below(2)) m.key = static_cast<int>(rng.below(12));
      Rational t(0);
      const std::size_t n = 1 + rng.below(10);
      for (std::size_t i = 0; i < n; ++i) {
        NoteEvent e;
        if (i == 0 || rng.below(5)) e.pitch = 40 + static_cast<int>(rng.below(40));
        e.onset = t;
        e.duration = Rational(static_cast<std::int64_t>(1 + rng.below(6)), static_cast<std::int64_t>(1 + rng.below(8)));
        t += e.duration;
        m.events.push_back(e);
      }
      melodies.push_back(m);
    }
    Corpus c = fixtures::corpus("rt" + std::to_string(trial), melodies, CorpusType::Teaching, "Somewhere, \"quoted\"");
    if (trial % 2) c.meta.composer_birth_year = 1800 + trial;
    const std::string once = serialize_canonical(c);
    const Corpus back = parse_canonical(once);
    EXPECT_EQ(back, c);
    EXPECT_EQ(serialize_canonical(back), once);
  }
}

TEST(Corpus, ParseMelodyAcceptsLoneObjectOrCorpus) {
  const Melody lone = parse_melody(R"({"id": "q", "notes": [{"pitch": 62, "onset": "0", "duration": "1"}]})");
  EXPECT_EQ(lone.id, "q");
  EXPECT_EQ(parse_melody(kOneMelody).id, "m1");
}

TEST(Corpus, LoadCorporaReadsDirectoriesInSortedOrder) {
  const auto dir = std::filesystem::temp_directory_path() / "melic_load_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  for (const char* id : {"zeta", "alpha"}) {
    std::ofstream(dir / (std::string(id) + ".json"))
        << serialize_canonical(fixtures::corpus(id, {fixtures::melody("m", {60, 62})}));
  }
  std::ofstream(dir / "notes.txt") << "ignored";
  const auto corpora = load_corpora({dir});
  ASSERT_EQ(corpora.size(), 2u);
  EXPECT_EQ(corpora[0].meta.corpus_id, "alpha");
  EXPECT_EQ(corpora[1].meta.corpus_id, "zeta");
  std::filesystem::remove_all(dir);
}

TEST(Corpus, RationalParsing) {
  EXPECT_EQ(parse_rational("3/6"), Rational(1, 2));
  EXPECT_EQ(parse_rational("2"), Rational(2));
  EXPECT_EQ(format_rational(Rational(2)), "2/1");
  EXPECT_THROW(parse_rational("1/0"), ValidationError);
  EXPECT_THROW(parse_rational("x"), ValidationError);
  EXPECT_THROW(parse_rational("0.25"), ValidationError);
}
