#pragma once

// Melody and corpus types, the canonical JSON corpus format, and a minimal
// single-spine kern reader.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "melic/error.hpp"
#include "melic/rational.hpp"

namespace melic {

struct NoteEvent {
  std::optional<int> pitch;  // MIDI semitone, 69 = A4; empty for a rest
  Rational onset;            // quarter notes
  Rational duration;         // quarter notes, > 0

  bool is_rest() const noexcept { return !pitch.has_value(); }
  friend bool operator==(const NoteEvent&, const NoteEvent&) = default;
};

struct Melody {
  std::string id;
  std::vector<NoteEvent> events;
  std::optional<int> key;  // annotated tonic chroma 0..11

  std::size_t note_count() const {
    return static_cast<std::size_t>(
        std::count_if(events.begin(), events.end(), [](const NoteEvent& e) { return !e.is_rest(); }));
  }
  friend bool operator==(const Melody&, const Melody&) = default;
};

enum class CorpusType { Folk, Art, Child, Teaching };

inline std::string_view to_string(CorpusType type) {
  switch (type) {
    case CorpusType::Folk: return "Folk";
    case CorpusType::Art: return "Art";
    case CorpusType::Child: return "Child";
    case CorpusType::Teaching: return "Teaching";
  }
  return "Folk";
}

inline CorpusType parse_corpus_type(std::string_view text) {
  if (text == "Folk") return CorpusType::Folk;
  if (text == "Art") return CorpusType::Art;
  if (text == "Child") return CorpusType::Child;
  if (text == "Teaching") return CorpusType::Teaching;
  throw ValidationError("unknown corpus type \"" + std::string(text) + "\"");
}

struct CorpusMeta {
  std::string corpus_id;
  CorpusType type = CorpusType::Folk;
  std::string region;
  std::optional<int> composer_birth_year;
  friend bool operator==(const CorpusMeta&, const CorpusMeta&) = default;
};

struct Corpus {
  CorpusMeta meta;
  std::vector<Melody> melodies;
  friend bool operator==(const Corpus&, const Corpus&) = default;
};

/// Checks the event-level invariants of one melody. Throws ValidationError
/// naming the melody on the first violation.
inline void validate_melody(const Melody& melody) {
  const auto fail = [&](const std::string& msg) {
    throw ValidationError("melody \"" + melody.id + "\": " + msg);
  };
  if (melody.events.empty()) fail("no events");
  bool has_note = false;
  for (std::size_t i = 0; i < melody.events.size(); ++i) {
    const NoteEvent& e = melody.events[i];
    if (e.duration <= Rational(0)) fail("non-positive duration at event " + std::to_string(i));
    if (e.onset < Rational(0)) fail("negative onset at event " + std::to_string(i));
    if (i > 0 && e.onset < melody.events[i - 1].onset) {
      fail("onset decreases at event " + std::to_string(i));
    }
    has_note = has_note || !e.is_rest();
  }
  if (!has_note) fail("no pitched events");
  if (melody.key && (*melody.key < 0 || *melody.key > 11)) fail("key outside 0..11");
}

inline void validate_corpus(const Corpus& corpus) {
  if (corpus.melodies.empty()) {
    throw ValidationError("corpus \"" + corpus.meta.corpus_id + "\" has no melodies");
  }
  std::set<std::string> seen;
  for (const Melody& m : corpus.melodies) {
    validate_melody(m);
    if (!seen.insert(m.id).second) {
      throw ValidationError("duplicate melody id \"" + m.id + "\" in corpus \"" +
                            corpus.meta.corpus_id + "\"");
    }
  }
}

namespace detail {

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

template <typename Json>
const Json& require(const Json& object, const char* key, const std::string& where) {
  if (!object.is_object() || !object.contains(key)) {
    throw ValidationError(where + ": missing field \"" + key + "\"");
  }
  return object.at(key);
}

template <typename Json>
std::string require_string(const Json& object, const char* key, const std::string& where) {
  const Json& v = require(object, key, where);
  if (!v.is_string()) throw ValidationError(where + ": field \"" + key + "\" must be a string");
  return v.template get<std::string>();
}

template <typename Json>
std::optional<int> optional_int(const Json& object, const char* key, const std::string& where) {
  const Json& v = require(object, key, where);
  if (v.is_null()) return std::nullopt;
  if (!v.is_number_integer()) {
    throw ValidationError(where + ": field \"" + key + "\" must be an integer or null");
  }
  return v.template get<int>();
}

inline Melody melody_from_json(const nlohmann::json& jm, const std::string& where) {
  Melody melody;
  melody.id = require_string(jm, "id", where);
  const std::string here = where + ", melody \"" + melody.id + "\"";
  melody.key = jm.contains("key") ? optional_int(jm, "key", here) : std::nullopt;
  const auto& notes = require(jm, "notes", here);
  if (!notes.is_array()) throw ValidationError(here + ": \"notes\" must be an array");
  for (std::size_t i = 0; i < notes.size(); ++i) {
    const std::string at = here + ", note " + std::to_string(i);
    NoteEvent e;
    e.pitch = optional_int(notes[i], "pitch", at);
    try {
      e.onset = parse_rational(require_string(notes[i], "onset", at));
      e.duration = parse_rational(require_string(notes[i], "duration", at));
    } catch (const ValidationError& err) {
      throw ValidationError(at + ": " + err.what());
    }
    melody.events.push_back(e);
  }
  validate_melody(melody);
  return melody;
}

inline nlohmann::ordered_json melody_to_json(const Melody& m) {
  nlohmann::ordered_json jm;
  jm["id"] = m.id;
  jm["key"] = m.key ? nlohmann::ordered_json(*m.key) : nlohmann::ordered_json(nullptr);
  auto notes = nlohmann::ordered_json::array();
  for (const NoteEvent& e : m.events) {
    nlohmann::ordered_json jn;
    jn["pitch"] = e.pitch ? nlohmann::ordered_json(*e.pitch) : nlohmann::ordered_json(nullptr);
    jn["onset"] = format_rational(e.onset);
    jn["duration"] = format_rational(e.duration);
    notes.push_back(std::move(jn));
  }
  jm["notes"] = std::move(notes);
  return jm;
}

inline nlohmann::json parse_json_text(std::string_view text) {
  try {
    return nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& err) {
    // nlohmann reports the 1-based byte index of the offending character.
    const auto [line, column] = line_column(text, err.byte == 0 ? 0 : err.byte - 1);
    throw ParseError("malformed corpus JSON", line, column);
  }
}

}  // namespace detail

/// Parses the canonical corpus format. Durations and onsets are exact.
inline Corpus parse_canonical(std::string_view text) {
  const nlohmann::json j = detail::parse_json_text(text);
  if (!j.is_object()) throw ValidationError("corpus document must be a JSON object");
  Corpus corpus;
  const std::string where = "corpus";
  corpus.meta.corpus_id = detail::require_string(j, "corpus_id", where);
  const std::string here = "corpus \"" + corpus.meta.corpus_id + "\"";
  corpus.meta.type = parse_corpus_type(detail::require_string(j, "type", here));
  corpus.meta.region = detail::require_string(j, "region", here);
  corpus.meta.composer_birth_year =
      j.contains("composer_birth_year") ? detail::optional_int(j, "composer_birth_year", here)
                                        : std::nullopt;
  const auto& melodies = detail::require(j, "melodies", here);
  if (!melodies.is_array()) throw ValidationError(here + ": \"melodies\" must be an array");
  for (const auto& jm : melodies) corpus.melodies.push_back(detail::melody_from_json(jm, here));
  validate_corpus(corpus);
  return corpus;
}

/// Parses a lone melody object `{ "id", "key", "notes" }`, or the first
/// melody of a full corpus document.
inline Melody parse_melody(std::string_view text) {
  const nlohmann::json j = detail::parse_json_text(text);
  if (j.is_object() && j.contains("melodies")) return parse_canonical(text).melodies.front();
  return detail::melody_from_json(j, "melody document");
}

/// Canonical serialisation: fixed key order, rationals as "p/q" in lowest terms.
inline std::string serialize_canonical(const Corpus& corpus) {
  nlohmann::ordered_json j;
  j["corpus_id"] = corpus.meta.corpus_id;
  j["type"] = std::string(to_string(corpus.meta.type));
  j["region"] = corpus.meta.region;
  j["composer_birth_year"] = corpus.meta.composer_birth_year
                                 ? nlohmann::ordered_json(*corpus.meta.composer_birth_year)
                                 : nlohmann::ordered_json(nullptr);
  auto melodies = nlohmann::ordered_json::array();
  for (const Melody& m : corpus.melodies) melodies.push_back(detail::melody_to_json(m));
  j["melodies"] = std::move(melodies);
  return j.dump(1) + "\n";
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

/// Loads canonical corpus files. Directories contribute every *.json file
/// they contain, in lexicographic path order.
inline std::vector<Corpus> load_corpora(const std::vector<std::filesystem::path>& paths) {
  std::vector<std::filesystem::path> files;
  for (const auto& p : paths) {
    if (std::filesystem::is_directory(p)) {
      std::vector<std::filesystem::path> found;
      for (const auto& entry : std::filesystem::directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") found.push_back(entry.path());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(p);
    }
  }
  std::vector<Corpus> corpora;
  for (const auto& f : files) {
    try {
      corpora.push_back(parse_canonical(read_text_file(f)));
    } catch (const ParseError& err) {
      throw ParseError(f.string() + ": " + err.message(), err.line(), err.column());
    } catch (const ValidationError& err) {
      throw ValidationError(f.string() + ": " + err.what());
    }
  }
  return corpora;
}

// ---------------------------------------------------------------------------
// Kern subset
// ---------------------------------------------------------------------------

namespace detail {

struct KernToken {
  std::string_view text;
  std::size_t line;
  std::size_t column;
};

struct KernNote {
  std::optional<int> pitch;
  Rational duration;
  bool tie_open = false;
  bool tie_continue = false;
  bool tie_close = false;
};

inline int kern_letter_offset(char lower) {
  switch (lower) {
    case 'c': return 0;
    case 'd': return 2;
    case 'e': return 4;
    case 'f': return 5;
    case 'g': return 7;
    case 'a': return 9;
    case 'b': return 11;
  }
  return -1;
}

inline KernNote parse_kern_note(const KernToken& tok) {
  const std::string_view s = tok.text;
  std::size_t i = 0;
  KernNote note;
  auto unsupported = [&](const std::string& what) {
    throw UnsupportedError("unsupported construct: " + what + " in token \"" + std::string(s) +
                           "\" (line " + std::to_string(tok.line) + ", column " +
                           std::to_string(tok.column) + ")");
  };
  auto malformed = [&](const std::string& what) {
    throw ParseError("malformed kern token \"" + std::string(s) + "\": " + what, tok.line,
                     tok.column + i);
  };

  if (i < s.size() && s[i] == '[') {
    note.tie_open = true;
    ++i;
  }
  const std::size_t digits_begin = i;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i == digits_begin) malformed("missing duration");
  const std::string_view digits = s.substr(digits_begin, i - digits_begin);
  Rational base;
  if (digits == "0") {
    base = Rational(8);  // breve
  } else if (digits.front() == '0') {
    unsupported("long note value \"" + std::string(digits) + "\"");
  } else {
    base = Rational(4, std::stoll(std::string(digits)));
  }
  int dots = 0;
  while (i < s.size() && s[i] == '.') {
    ++dots;
    ++i;
  }
  note.duration = base;
  Rational add = base;
  for (int d = 0; d < dots; ++d) {
    add /= 2;
    note.duration += add;
  }

  if (i >= s.size()) malformed("missing pitch or rest");
  if (s[i] == 'r') {
    ++i;
    while (i < s.size() && s[i] == 'r') ++i;
  } else {
    const char letter = s[i];
    const char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(letter)));
    const int offset = kern_letter_offset(lower);
    if (offset < 0) {
      if (letter == 'q' || letter == 'Q') unsupported("grace note");
      malformed("unknown pitch letter");
    }
    std::size_t count = 0;
    while (i < s.size() && s[i] == letter) {
      ++count;
      ++i;
    }
    const bool upper = std::isupper(static_cast<unsigned char>(letter)) != 0;
    const int octave = upper ? 4 - static_cast<int>(count) : 3 + static_cast<int>(count);
    int pitch = 12 * (octave + 1) + offset;
    while (i < s.size() && (s[i] == '#' || s[i] == '-' || s[i] == 'n')) {
      if (s[i] == '#') pitch += 1;
      if (s[i] == '-') pitch -= 1;
      ++i;
    }
    note.pitch = pitch;
  }

  while (i < s.size()) {
    const char c = s[i];
    if (c == ']') {
      note.tie_close = true;
    } else if (c == '_') {
      note.tie_continue = true;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || kern_letter_offset(static_cast<char>(
                                                                  std::tolower(static_cast<unsigned char>(c)))) >= 0) {
      unsupported("chord");
    } else {
      unsupported(std::string("character '") + c + "'");
    }
    ++i;
  }
  if (note.pitch == std::nullopt && (note.tie_open || note.tie_close || note.tie_continue)) {
    malformed("tied rest");
  }
  return note;
}

}  // namespace detail

/// Reads a single-spine monophonic kern fragment. Whitespace separates
/// successive notes, barlines (`=...`), comments (`!...`) and interpretations
/// (`*...`) are skipped, ties are merged into one event. Multiple spines,
/// spine manipulators, chords, grace notes and editorial marks are rejected.
inline Melody parse_kern_subset(std::string_view text, std::string id = "kern") {
  std::vector<detail::KernToken> tokens;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty() && line.front() != '!') {
      if (const auto tab = line.find('\t'); tab != std::string_view::npos) {
        throw UnsupportedError("unsupported construct: multiple spines (line " +
                               std::to_string(line_no) + ")");
      }
      std::size_t col = 0;
      while (col < line.size()) {
        while (col < line.size() && line[col] == ' ') ++col;
        const std::size_t start = col;
        while (col < line.size() && line[col] != ' ') ++col;
        if (col > start) tokens.push_back({line.substr(start, col - start), line_no, start + 1});
      }
    }
    if (end >= text.size()) break;
    pos = end + 1;
  }

  Melody melody;
  melody.id = std::move(id);
  Rational onset(0);
  std::optional<NoteEvent> tied;
  for (const auto& tok : tokens) {
    const std::string_view s = tok.text;
    if (s.front() == '=' || s == ".") continue;
    if (s.rfind("**", 0) == 0) {
      if (s != "**kern") {
        throw UnsupportedError("unsupported construct: spine type \"" + std::string(s) + "\"");
      }
      continue;
    }
    if (s.front() == '*') {
      if (s == "*^" || s == "*v" || s == "*x" || s == "*+") {
        throw UnsupportedError("unsupported construct: spine manipulator \"" + std::string(s) + "\"");
      }
      continue;
    }
    const detail::KernNote note = detail::parse_kern_note(tok);
    if (tied) {
      if (!(note.tie_continue || note.tie_close)) {
        throw ParseError("tie not closed before next note", tok.line, tok.column);
      }
      if (note.pitch != tied->pitch) throw ParseError("tie joins different pitches", tok.line, tok.column);
      tied->duration += note.duration;
      if (note.tie_close) {
        onset += tied->duration;
        melody.events.push_back(*tied);
        tied.reset();
      }
      continue;
    }
    if (note.tie_continue || note.tie_close) {
      throw ParseError("tie continuation without an open tie", tok.line, tok.column);
    }
    NoteEvent event{note.pitch, onset, note.duration};
    if (note.tie_open) {
      tied = event;
      continue;
    }
    melody.events.push_back(event);
    onset += note.duration;
  }
  if (tied) throw ParseError("unterminated tie", line_no, 1);
  validate_melody(melody);
  return melody;
}

}  // namespace melic
