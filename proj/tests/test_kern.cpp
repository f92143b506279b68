#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace melic;

namespace {

std::vector<int> pitches(const Melody& m) {
  std::vector<int> out;
  for (const auto& e : m.events) out.push_back(e.pitch ? *e.pitch : -1);
  return out;
}

std::vector<Rational> durations(const Melody& m) {
  std::vector<Rational> out;
  for (const auto& e : m.events) out.push_back(e.duration);
  return out;
}

}  // namespace

TEST(Kern, QuarterNotes) {
  const Melody m = parse_kern_subset("4c 4d 4e");
  EXPECT_EQ(pitches(m), (std::vector<int>{60, 62, 64}));
  EXPECT_EQ(durations(m), (std::vector<Rational>{1, 1, 1}));
  EXPECT_EQ(m.events[2].onset, Rational(2));
}

TEST(Kern, DottedEighthA) {
  const Melody m = parse_kern_subset("8.a");
  EXPECT_EQ(pitches(m), std::vector<int>{69});
  EXPECT_EQ(m.events[0].duration, Rational(3, 4));
}

TEST(Kern, DottedHalfRest) {
  const Melody m = parse_kern_subset("4c 2.r 4d");
  ASSERT_EQ(m.events.size(), 3u);
  EXPECT_TRUE(m.events[1].is_rest());
  EXPECT_EQ(m.events[1].duration, Rational(3));
  EXPECT_EQ(m.events[2].onset, Rational(4));
}

TEST(Kern, TieMergesIntoOneEvent) {
  const Melody m = parse_kern_subset("[4c 4c]");
  ASSERT_EQ(m.events.size(), 1u);
  EXPECT_EQ(*m.events[0].pitch, 60);
  EXPECT_EQ(m.events[0].duration, Rational(2));
  const Melody chain = parse_kern_subset("[2g 4g_ 8g] 8a");
  ASSERT_EQ(chain.events.size(), 2u);
  EXPECT_EQ(chain.events[0].duration, Rational(7, 2));
  EXPECT_EQ(chain.events[1].onset, Rational(7, 2));
}

TEST(Kern, OctavesAndAccidentals) {
  const Melody m = parse_kern_subset("4cc 4C 4CC 4f# 4b- 4e## 4en 16ccc");
  EXPECT_EQ(pitches(m), (std::vector<int>{72, 48, 36, 66, 70, 66, 64, 84}));
  EXPECT_EQ(m.events.back().duration, Rational(1, 4));
}

TEST(Kern, BreveAndDoubleDot) {
  const Melody m = parse_kern_subset("0c 4..d");
  EXPECT_EQ(m.events[0].duration, Rational(8));
  EXPECT_EQ(m.events[1].duration, Rational(7, 4));
}

TEST(Kern, CommentsBarlinesAndInterpretationsIgnored) {
  const Melody m = parse_kern_subset("!! title\n**kern\n*M4/4\n*k[f#]\n=1\n4c 4d\n=2\n. 2e\n*-\n");
  EXPECT_EQ(pitches(m), (std::vector<int>{60, 62, 64}));
}

TEST(Kern, UnsupportedConstructsRaise) {
  EXPECT_THROW(parse_kern_subset("4c\t4e"), UnsupportedError);   // two spines
  EXPECT_THROW(parse_kern_subset("4c 4e4g"), UnsupportedError);  // chord
  EXPECT_THROW(parse_kern_subset("4cq"), UnsupportedError);      // grace note
  EXPECT_THROW(parse_kern_subset("*^"), UnsupportedError);       // spine split
  EXPECT_THROW(parse_kern_subset("**mens"), UnsupportedError);
  EXPECT_THROW(parse_kern_subset("4c;"), UnsupportedError);  // fermata and other marks
}

TEST(Kern, MalformedTiesAreParseErrors) {
  EXPECT_THROW(parse_kern_subset("[4c 4d]"), ParseError);
  EXPECT_THROW(parse_kern_subset("[4c 4c"), ParseError);
  EXPECT_THROW(parse_kern_subset("4x"), Error);
}

TEST(Kern, ErrorsCarryPosition) {
  try {
    parse_kern_subset("4c\n4d 4e[");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  } catch (const UnsupportedError&) {
  }
}
