#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "melic/melic.hpp"

namespace fixtures {

/// Consecutive notes; a pitch of -1 marks a rest.
inline melic::Melody melody(const std::string& id, const std::vector<int>& pitches,
                            const std::vector<melic::Rational>& durations = {}) {
  melic::Melody m;
  m.id = id;
  melic::Rational t(0);
  for (std::size_t i = 0; i < pitches.size(); ++i) {
    melic::NoteEvent e;
    if (pitches[i] >= 0) e.pitch = pitches[i];
    e.onset = t;
    e.duration = durations.empty() ? melic::Rational(1) : durations[i];
    t += e.duration;
    m.events.push_back(e);
  }
  return m;
}

inline melic::Corpus corpus(const std::string& id, std::vector<melic::Melody> melodies,
                            melic::CorpusType type = melic::CorpusType::Folk, const std::string& region = "R") {
  melic::Corpus c;
  c.meta.corpus_id = id;
  c.meta.type = type;
  c.meta.region = region;
  c.melodies = std::move(melodies);
  return c;
}

inline std::vector<std::int64_t> ints(const melic::ViewpointSequence& seq) {
  std::vector<std::int64_t> out;
  for (const auto& s : seq.symbols) out.push_back(std::get<std::int64_t>(s));
  return out;
}

inline std::vector<melic::Rational> rationals(const melic::ViewpointSequence& seq) {
  std::vector<melic::Rational> out;
  for (const auto& s : seq.symbols) out.push_back(std::get<melic::Rational>(s));
  return out;
}

}  // namespace fixtures
