#pragma once

// Recursive removal of repeated substrings and the measures built on it.
//
// Each round scans the current pieces for substrings of length >= l_min
// (and at most half the original length) that occur at least twice without
// overlapping, picks the one maximising count x length, cuts every
// occurrence out of the pieces and keeps a single copy of it as a new piece.
// Rounds continue until nothing repeats; L_NR is the combined length of the
// surviving pieces.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "melic/corpus.hpp"
#include "melic/error.hpp"
#include "melic/infotheory.hpp"
#include "melic/viewpoints.hpp"

namespace melic {

template <typename T>
struct RepeatedSubstring {
  std::vector<T> substring;
  std::size_t count = 0;  // non-overlapping occurrences
};

template <typename T>
struct RepetitionResult {
  std::vector<std::vector<T>> pieces;
  std::size_t l_nr = 0;
  std::vector<RepeatedSubstring<T>> removed_matches;  // in removal order
};

namespace detail {

using Codes = std::vector<int>;

struct CodesHash {
  std::size_t operator()(const Codes& v) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (int x : v) {
      h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(x));
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(mix64(h));
  }
};

struct Tally {
  std::size_t count = 0;
  std::size_t piece = 0;
  std::size_t end = 0;
};

/// Every substring with length in [l_min, cap] and >= 2 non-overlapping
/// occurrences across `pieces`. Occurrences are taken leftmost-first within
/// each piece. Output is ordered by length, then lexicographically.
inline std::vector<RepeatedSubstring<int>> find_repeats(const std::vector<Codes>& pieces, std::size_t l_min,
                                                        std::size_t cap) {
  std::vector<RepeatedSubstring<int>> out;
  for (std::size_t len = l_min; len <= cap; ++len) {
    std::unordered_map<Codes, Tally, CodesHash> tallies;
    bool any_recurrence = false;
    for (std::size_t p = 0; p < pieces.size(); ++p) {
      const Codes& piece = pieces[p];
      if (piece.size() < len) continue;
      for (std::size_t start = 0; start + len <= piece.size(); ++start) {
        Codes key(piece.begin() + static_cast<std::ptrdiff_t>(start),
                  piece.begin() + static_cast<std::ptrdiff_t>(start + len));
        auto [it, inserted] = tallies.try_emplace(std::move(key));
        Tally& t = it->second;
        if (!inserted) any_recurrence = true;
        if (!inserted && t.piece == p && start < t.end) continue;
        ++t.count;
        t.piece = p;
        t.end = start + len;
      }
    }
    // A substring that never recurs at this length cannot recur when longer.
    if (!any_recurrence) break;
    std::vector<RepeatedSubstring<int>> at_len;
    for (auto& [key, t] : tallies) {
      if (t.count >= 2) at_len.push_back({key, t.count});
    }
    std::sort(at_len.begin(), at_len.end(),
              [](const auto& a, const auto& b) { return a.substring < b.substring; });
    out.insert(out.end(), std::make_move_iterator(at_len.begin()), std::make_move_iterator(at_len.end()));
  }
  return out;
}

/// Highest count x length; ties prefer the longer match, then the
/// lexicographically smaller one.
inline const RepeatedSubstring<int>* best_repeat(const std::vector<RepeatedSubstring<int>>& repeats) {
  const RepeatedSubstring<int>* best = nullptr;
  for (const auto& r : repeats) {
    if (!best) {
      best = &r;
      continue;
    }
    const std::size_t score = r.count * r.substring.size();
    const std::size_t best_score = best->count * best->substring.size();
    if (score != best_score) {
      if (score > best_score) best = &r;
    } else if (r.substring.size() != best->substring.size()) {
      if (r.substring.size() > best->substring.size()) best = &r;
    } else if (r.substring < best->substring) {
      best = &r;
    }
  }
  return best;
}

/// Cuts the leftmost non-overlapping occurrences of `match` out of every
/// piece and appends one copy of `match`.
inline std::vector<Codes> divide_by_match(const std::vector<Codes>& pieces, const Codes& match) {
  std::vector<Codes> out;
  const std::size_t len = match.size();
  for (const Codes& piece : pieces) {
    std::size_t segment_start = 0;
    std::size_t i = 0;
    while (i + len <= piece.size()) {
      if (std::equal(match.begin(), match.end(), piece.begin() + static_cast<std::ptrdiff_t>(i))) {
        if (i > segment_start) {
          out.emplace_back(piece.begin() + static_cast<std::ptrdiff_t>(segment_start),
                           piece.begin() + static_cast<std::ptrdiff_t>(i));
        }
        i += len;
        segment_start = i;
      } else {
        ++i;
      }
    }
    if (segment_start < piece.size()) {
      out.emplace_back(piece.begin() + static_cast<std::ptrdiff_t>(segment_start), piece.end());
    }
  }
  out.push_back(match);
  return out;
}

/// Dense order-preserving integer codes for the symbols of `seq`.
template <typename T>
std::pair<Codes, std::vector<T>> encode(std::span<const T> seq) {
  std::map<T, int> ids;
  for (const T& s : seq) ids.emplace(s, 0);
  std::vector<T> alphabet;
  int next = 0;
  for (auto& [sym, id] : ids) {
    id = next++;
    alphabet.push_back(sym);
  }
  Codes codes;
  codes.reserve(seq.size());
  for (const T& s : seq) codes.push_back(ids.at(s));
  return {std::move(codes), std::move(alphabet)};
}

template <typename T>
std::vector<T> decode(const Codes& codes, const std::vector<T>& alphabet) {
  std::vector<T> out;
  out.reserve(codes.size());
  for (int c : codes) out.push_back(alphabet[static_cast<std::size_t>(c)]);
  return out;
}

inline void check_lmin(std::size_t l_min) {
  if (l_min < 2) throw ParameterError("l_min must be at least 2");
}

}  // namespace detail

/// Repeated substrings of `seq` as found before any removal (length in
/// [l_min, floor(|seq|/2)], >= 2 non-overlapping occurrences).
template <typename T>
std::vector<RepeatedSubstring<T>> repeated_substrings(std::span<const T> seq, std::size_t l_min) {
  detail::check_lmin(l_min);
  auto [codes, alphabet] = detail::encode<T>(seq);
  std::vector<detail::Codes> pieces{codes};
  std::vector<RepeatedSubstring<T>> out;
  for (auto& r : detail::find_repeats(pieces, l_min, seq.size() / 2)) {
    out.push_back({detail::decode(r.substring, alphabet), r.count});
  }
  return out;
}

template <typename T>
RepetitionResult<T> remove_repetition(std::span<const T> seq, std::size_t l_min) {
  detail::check_lmin(l_min);
  if (seq.empty()) throw DegenerateInputError("remove_repetition of an empty sequence");
  auto [codes, alphabet] = detail::encode<T>(seq);
  const std::size_t cap = seq.size() / 2;
  std::vector<detail::Codes> pieces{std::move(codes)};
  RepetitionResult<T> result;
  while (true) {
    const auto repeats = detail::find_repeats(pieces, l_min, cap);
    const auto* best = detail::best_repeat(repeats);
    if (!best) break;
    result.removed_matches.push_back({detail::decode(best->substring, alphabet), best->count});
    pieces = detail::divide_by_match(pieces, best->substring);
  }
  for (const auto& p : pieces) {
    result.l_nr += p.size();
    result.pieces.push_back(detail::decode(p, alphabet));
  }
  return result;
}

inline RepetitionResult<Symbol> remove_repetition(const ViewpointSequence& seq, std::size_t l_min) {
  return remove_repetition<Symbol>(seq.symbols, l_min);
}

/// 1 - L_NR / L.
template <typename T>
double repetition_fraction(std::span<const T> seq, std::size_t l_min) {
  const auto r = remove_repetition<T>(seq, l_min);
  return 1.0 - static_cast<double>(r.l_nr) / static_cast<double>(seq.size());
}

inline double repetition_fraction(const ViewpointSequence& seq, std::size_t l_min) {
  return repetition_fraction<Symbol>(seq.symbols, l_min);
}

struct TotalInformation {
  double joint_entropy = 0.0;  // H(Chroma, Duration), bits per note
  std::size_t length = 0;
  std::size_t l_nr = 0;
  double total_bits = 0.0;  // H x L_NR
};

inline TotalInformation total_information(const Melody& melody, std::size_t l_min = 2) {
  const ViewpointSequence joint = extract_viewpoint(melody, ViewpointKind::JointChromaDuration);
  TotalInformation t;
  t.joint_entropy = entropy(distribution_of(joint));
  t.length = joint.size();
  t.l_nr = remove_repetition(joint, l_min).l_nr;
  t.total_bits = t.joint_entropy * static_cast<double>(t.l_nr);
  return t;
}

}  // namespace melic
