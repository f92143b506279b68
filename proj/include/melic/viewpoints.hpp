#pragma once

// Melodic viewpoints: derived symbol sequences over pitch and rhythm.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "melic/corpus.hpp"
#include "melic/error.hpp"
#include "melic/rational.hpp"

namespace melic {

enum class ViewpointKind {
  Pitch,
  Chroma,
  ScaleDegree,
  MInt,
  SInt,
  Contour,
  Duration,
  IOI,
  IOIRatio,
  DurationRatio,
  JointChromaDuration,
  JointMIntDuration,
};

inline constexpr std::array<std::pair<ViewpointKind, std::string_view>, 12> kViewpointNames{{
    {ViewpointKind::Pitch, "pitch"},
    {ViewpointKind::Chroma, "chroma"},
    {ViewpointKind::ScaleDegree, "sdeg"},
    {ViewpointKind::MInt, "mint"},
    {ViewpointKind::SInt, "sint"},
    {ViewpointKind::Contour, "contour"},
    {ViewpointKind::Duration, "duration"},
    {ViewpointKind::IOI, "ioi"},
    {ViewpointKind::IOIRatio, "ioi-ratio"},
    {ViewpointKind::DurationRatio, "duration-ratio"},
    {ViewpointKind::JointChromaDuration, "chroma-duration"},
    {ViewpointKind::JointMIntDuration, "mint-duration"},
}};

inline std::string_view to_string(ViewpointKind kind) {
  for (const auto& [k, name] : kViewpointNames) {
    if (k == kind) return name;
  }
  return "?";
}

inline ViewpointKind parse_viewpoint_kind(std::string_view text) {
  for (const auto& [k, name] : kViewpointNames) {
    if (name == text) return k;
  }
  throw ParameterError("unknown viewpoint \"" + std::string(text) + "\"");
}

/// (pitch-kind symbol, rhythm-kind symbol) for the joint viewpoints.
using JointSymbol = std::pair<std::int64_t, Rational>;
using Symbol = std::variant<std::int64_t, Rational, JointSymbol>;

inline std::string to_string(const Symbol& s) {
  if (const auto* i = std::get_if<std::int64_t>(&s)) return std::to_string(*i);
  if (const auto* r = std::get_if<Rational>(&s)) return format_rational(*r);
  const auto& j = std::get<JointSymbol>(s);
  return "(" + std::to_string(j.first) + "," + format_rational(j.second) + ")";
}

struct ViewpointSequence {
  ViewpointKind kind = ViewpointKind::Pitch;
  std::vector<Symbol> symbols;

  std::size_t size() const noexcept { return symbols.size(); }
  bool empty() const noexcept { return symbols.empty(); }
};

// ---------------------------------------------------------------------------
// Integer pitch helpers, shared with the generative models.
// ---------------------------------------------------------------------------

inline int chroma_of(int pitch) noexcept { return ((pitch % 12) + 12) % 12; }

inline std::vector<int> to_chroma(std::span<const int> pitches) {
  std::vector<int> out(pitches.size());
  std::transform(pitches.begin(), pitches.end(), out.begin(), chroma_of);
  return out;
}

template <typename T>
std::vector<T> differences(std::span<const T> values) {
  std::vector<T> out;
  if (values.size() < 2) return out;
  out.reserve(values.size() - 1);
  for (std::size_t i = 1; i < values.size(); ++i) out.push_back(values[i] - values[i - 1]);
  return out;
}

/// Rank of each chroma among the melody's sorted distinct chroma values.
inline std::vector<int> to_scale_degrees(std::span<const int> chroma) {
  std::array<int, 12> rank{};
  rank.fill(-1);
  for (int c : chroma) rank[static_cast<std::size_t>(c)] = 0;
  int next = 0;
  for (auto& r : rank) {
    if (r == 0) r = next++;
  }
  std::vector<int> out(chroma.size());
  std::transform(chroma.begin(), chroma.end(), out.begin(),
                 [&](int c) { return rank[static_cast<std::size_t>(c)]; });
  return out;
}

// ---------------------------------------------------------------------------
// Extraction
// ---------------------------------------------------------------------------

inline std::vector<int> pitches_of(const Melody& melody) {
  std::vector<int> out;
  for (const NoteEvent& e : melody.events) {
    if (e.pitch) out.push_back(*e.pitch);
  }
  return out;
}

/// Durations of pitched events; rests are ignored.
inline std::vector<Rational> durations_of(const Melody& melody) {
  std::vector<Rational> out;
  for (const NoteEvent& e : melody.events) {
    if (e.pitch) out.push_back(e.duration);
  }
  return out;
}

/// Onset differences between successive pitched events, so a rest is
/// absorbed into the IOI of the note before it.
inline std::vector<Rational> iois_of(const Melody& melody) {
  std::vector<Rational> onsets;
  for (const NoteEvent& e : melody.events) {
    if (e.pitch) onsets.push_back(e.onset);
  }
  if (onsets.size() < 2) {
    throw DegenerateInputError("melody \"" + melody.id + "\": IOI needs at least two notes");
  }
  return differences<Rational>(onsets);
}

inline std::vector<Rational> successive_ratios(std::span<const Rational> values, const std::string& what,
                                               const std::string& melody_id) {
  std::vector<Rational> out;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i - 1] == Rational(0)) {
      throw DegenerateInputError("melody \"" + melody_id + "\": zero " + what +
                                 " (simultaneous onsets) makes the ratio undefined");
    }
    out.push_back(values[i] / values[i - 1]);
  }
  return out;
}

template <typename T>
std::vector<Symbol> as_symbols(std::span<const T> values) {
  std::vector<Symbol> out;
  out.reserve(values.size());
  for (const T& v : values) {
    if constexpr (std::is_integral_v<T>) {
      out.emplace_back(static_cast<std::int64_t>(v));
    } else {
      out.emplace_back(v);
    }
  }
  return out;
}

inline ViewpointSequence extract_viewpoint(const Melody& melody, ViewpointKind kind) {
  if (melody.note_count() == 0) {
    throw DegenerateInputError("melody \"" + melody.id + "\" has no pitched events");
  }
  ViewpointSequence seq{kind, {}};
  const std::vector<int> pitch = pitches_of(melody);
  switch (kind) {
    case ViewpointKind::Pitch:
      seq.symbols = as_symbols<int>(pitch);
      break;
    case ViewpointKind::Chroma:
      seq.symbols = as_symbols<int>(to_chroma(pitch));
      break;
    case ViewpointKind::ScaleDegree:
      seq.symbols = as_symbols<int>(to_scale_degrees(to_chroma(pitch)));
      break;
    case ViewpointKind::MInt:
      seq.symbols = as_symbols<int>(differences<int>(pitch));
      break;
    case ViewpointKind::SInt: {
      const auto degrees = to_scale_degrees(to_chroma(pitch));
      seq.symbols = as_symbols<int>(differences<int>(degrees));
      break;
    }
    case ViewpointKind::Contour: {
      std::vector<int> contour;
      for (int d : differences<int>(pitch)) contour.push_back((d > 0) - (d < 0));
      seq.symbols = as_symbols<int>(contour);
      break;
    }
    case ViewpointKind::Duration:
      seq.symbols = as_symbols<Rational>(durations_of(melody));
      break;
    case ViewpointKind::IOI:
      seq.symbols = as_symbols<Rational>(iois_of(melody));
      break;
    case ViewpointKind::IOIRatio:
      seq.symbols = as_symbols<Rational>(successive_ratios(iois_of(melody), "IOI", melody.id));
      break;
    case ViewpointKind::DurationRatio:
      seq.symbols = as_symbols<Rational>(successive_ratios(durations_of(melody), "duration", melody.id));
      break;
    case ViewpointKind::JointChromaDuration:
    case ViewpointKind::JointMIntDuration: {
      const std::vector<int> first = kind == ViewpointKind::JointChromaDuration
                                         ? to_chroma(pitch)
                                         : differences<int>(pitch);
      const std::vector<Rational> dur = durations_of(melody);
      const std::size_t n = std::min(first.size(), dur.size());
      for (std::size_t i = 0; i < n; ++i) seq.symbols.emplace_back(JointSymbol{first[i], dur[i]});
      break;
    }
  }
  return seq;
}

/// Pairs symbol i of `a` with symbol i of `b`, truncated to the shorter.
inline std::pair<ViewpointSequence, ViewpointSequence> align(ViewpointSequence a, ViewpointSequence b) {
  const std::size_t n = std::min(a.size(), b.size());
  a.symbols.resize(n);
  b.symbols.resize(n);
  return {std::move(a), std::move(b)};
}

// ---------------------------------------------------------------------------
// Tonic estimation and octave recovery
// ---------------------------------------------------------------------------

enum class TonicMethod { Final, First, Modal };

inline TonicMethod parse_tonic_method(std::string_view text) {
  if (text == "final") return TonicMethod::Final;
  if (text == "first") return TonicMethod::First;
  if (text == "modal") return TonicMethod::Modal;
  throw ParameterError("unknown tonic method \"" + std::string(text) + "\"");
}

/// Modal ties go to the final note's chroma, then to the lowest class.
inline int estimate_tonic(const Melody& melody, TonicMethod method) {
  const std::vector<int> chroma = to_chroma(pitches_of(melody));
  if (chroma.empty()) {
    throw DegenerateInputError("melody \"" + melody.id + "\": cannot estimate tonic without notes");
  }
  switch (method) {
    case TonicMethod::Final: return chroma.back();
    case TonicMethod::First: return chroma.front();
    case TonicMethod::Modal: break;
  }
  std::array<int, 12> counts{};
  for (int c : chroma) ++counts[static_cast<std::size_t>(c)];
  const int best = *std::max_element(counts.begin(), counts.end());
  if (counts[static_cast<std::size_t>(chroma.back())] == best) return chroma.back();
  for (int c = 0; c < 12; ++c) {
    if (counts[static_cast<std::size_t>(c)] == best) return c;
  }
  return chroma.back();
}

/// Smallest-interval reading of a chroma step: b - a folded into [-6, +5].
inline int nearest_interval(int from_chroma, int to_chroma) noexcept {
  return ((to_chroma - from_chroma + 6) % 12 + 12) % 12 - 6;
}

struct OctaveRecovery {
  std::vector<int> predicted;
  std::optional<double> accuracy;
};

inline OctaveRecovery recover_octaves(const ViewpointSequence& chroma,
                                      const std::optional<ViewpointSequence>& truth = std::nullopt) {
  if (chroma.kind != ViewpointKind::Chroma) throw ParameterError("recover_octaves needs a Chroma sequence");
  if (chroma.size() < 2) throw ParameterError("recover_octaves needs at least two symbols");
  OctaveRecovery out;
  for (std::size_t i = 1; i < chroma.size(); ++i) {
    out.predicted.push_back(nearest_interval(static_cast<int>(std::get<std::int64_t>(chroma.symbols[i - 1])),
                                             static_cast<int>(std::get<std::int64_t>(chroma.symbols[i]))));
  }
  if (truth) {
    if (truth->kind != ViewpointKind::MInt || truth->size() != out.predicted.size()) {
      throw ParameterError("recover_octaves truth must be the matching MInt sequence");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < out.predicted.size(); ++i) {
      hits += std::get<std::int64_t>(truth->symbols[i]) == out.predicted[i];
    }
    out.accuracy = static_cast<double>(hits) / static_cast<double>(out.predicted.size());
  }
  return out;
}

}  // namespace melic
