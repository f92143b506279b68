#pragma once

// Generative sequence models: nine pitch models, sixteen rhythm models,
// JSD-based grid fitting, and the scale-entropy simulation with its
// kernel-density log-likelihood.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "melic/corpus.hpp"
#include "melic/error.hpp"
#include "melic/infotheory.hpp"
#include "melic/parallel.hpp"
#include "melic/random.hpp"
#include "melic/rational.hpp"
#include "melic/stats.hpp"
#include "melic/viewpoints.hpp"

namespace melic {

/// How letters are weighted: uniform, power law over randomly permuted
/// ranks, or power law decaying away from the middle of the sorted letters.
enum class LetterDist { Uniform = 1, PowerLawRandom = 2, PowerLawCentral = 3, Metrical = 4 };

/// Weights for `n` letters sorted ascending. PowerLawCentral gives letter j
/// weight (1 + |j - (n-1)/2|)^(-exponent); for a symmetric interval set that
/// is (1 + |interval|)^(-exponent).
inline std::vector<double> letter_weights(std::size_t n, LetterDist dist, double exponent, Rng& rng) {
  std::vector<double> w(n, 1.0);
  if (dist == LetterDist::PowerLawRandom) {
    std::vector<std::size_t> rank(n);
    std::iota(rank.begin(), rank.end(), 1);
    rng.shuffle(std::span<std::size_t>(rank));
    for (std::size_t j = 0; j < n; ++j) w[j] = std::pow(static_cast<double>(rank[j]), -exponent);
  } else if (dist == LetterDist::PowerLawCentral) {
    const double center = 0.5 * static_cast<double>(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      w[j] = std::pow(1.0 + std::abs(static_cast<double>(j) - center), -exponent);
    }
  }
  return w;
}

// ---------------------------------------------------------------------------
// Pitch models
// ---------------------------------------------------------------------------

enum class PitchFamily { S, I, IS };

struct PitchModelSpec {
  PitchFamily family = PitchFamily::IS;
  LetterDist dist = LetterDist::PowerLawCentral;
  int alphabet = 7;  // A
  int length = 30;   // L, notes per sequence
  double range = 2.0;  // O
  double exponent = 2.0;
  /// Pitch stays within +/- range * semitones_per_range of the start.
  double semitones_per_range = 2.0;
  std::size_t interval_tries = 100;
  std::size_t sequence_retries = 1000;

  std::string name() const {
    const char* prefix = family == PitchFamily::S ? "S" : family == PitchFamily::I ? "I" : "IS";
    return prefix + std::to_string(static_cast<int>(dist));
  }
  int half_width() const { return static_cast<int>(std::floor(range * semitones_per_range + 1e-9)); }
};

inline PitchModelSpec parse_pitch_model(std::string_view name) {
  PitchModelSpec spec;
  if (name.size() < 2) throw ParameterError("unknown pitch model \"" + std::string(name) + "\"");
  const std::string_view prefix = name.substr(0, name.size() - 1);
  const char digit = name.back();
  if (prefix == "S") {
    spec.family = PitchFamily::S;
  } else if (prefix == "I") {
    spec.family = PitchFamily::I;
  } else if (prefix == "IS") {
    spec.family = PitchFamily::IS;
  } else {
    throw ParameterError("unknown pitch model \"" + std::string(name) + "\"");
  }
  if (digit < '1' || digit > '3') throw ParameterError("unknown pitch model \"" + std::string(name) + "\"");
  spec.dist = static_cast<LetterDist>(digit - '0');
  return spec;
}

inline const std::array<std::string_view, 9> kPitchModels{"S1", "S2", "S3", "I1", "I2", "I3", "IS1", "IS2", "IS3"};

struct PitchSample {
  std::vector<int> pitch;
  std::vector<int> chroma;
  std::vector<int> mint;
  std::vector<int> sdeg;
  std::vector<int> sint;
};

inline PitchSample make_pitch_sample(std::vector<int> pitch) {
  PitchSample s;
  s.chroma = to_chroma(pitch);
  s.mint = differences<int>(pitch);
  s.sdeg = to_scale_degrees(s.chroma);
  s.sint = differences<int>(s.sdeg);
  s.pitch = std::move(pitch);
  return s;
}

namespace detail {

/// `count` distinct chroma classes; `include_zero` forces class 0 in.
inline std::vector<int> random_scale(int count, bool include_zero, Rng& rng) {
  std::vector<int> pool;
  for (int c = include_zero ? 1 : 0; c < 12; ++c) pool.push_back(c);
  const std::size_t want = static_cast<std::size_t>(count - (include_zero ? 1 : 0));
  for (std::size_t k = 0; k < want; ++k) std::swap(pool[k], pool[k + rng.below(pool.size() - k)]);
  std::vector<int> scale(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(want));
  if (include_zero) scale.push_back(0);
  std::sort(scale.begin(), scale.end());
  return scale;
}

/// Random walk over `letters` (intervals) starting at 0. Each offending
/// interval is redrawn up to `tries` times before the walk restarts.
template <typename Legal>
std::optional<std::vector<int>> interval_walk(std::span<const int> letters, std::span<const double> weights,
                                              int length, std::size_t tries, Rng& rng, Legal&& legal) {
  std::vector<int> pitch{0};
  while (static_cast<int>(pitch.size()) < length) {
    bool placed = false;
    for (std::size_t t = 0; t < tries && !placed; ++t) {
      const int next = pitch.back() + letters[rng.weighted(weights)];
      if (legal(next)) {
        pitch.push_back(next);
        placed = true;
      }
    }
    if (!placed) return std::nullopt;
  }
  return pitch;
}

}  // namespace detail

/// One sequence of `spec.length` notes.
///  S:  a random A-subset of the 12 chroma classes fixes the scale; pitches
///      are drawn from the in-range pitches on that scale.
///  I:  intervals in [-A, A] starting from 0, rejected when they leave the range.
///  IS: intervals that land on a random A-note scale containing 0 and stay
///      in range.
inline PitchSample generate_pitch_sequence(const PitchModelSpec& spec, Rng& rng) {
  if (spec.alphabet < 1 || spec.alphabet > 12) throw ParameterError("pitch model needs 1 <= A <= 12");
  if (spec.length < 1) throw ParameterError("pitch model needs L >= 1");
  const int hw = spec.half_width();
  if (hw < 0) throw ParameterError("pitch range must be non-negative");
  for (std::size_t attempt = 0; attempt < spec.sequence_retries; ++attempt) {
    switch (spec.family) {
      case PitchFamily::S: {
        const auto scale = detail::random_scale(spec.alphabet, false, rng);
        std::vector<int> letters;
        for (int p = -hw; p <= hw; ++p) {
          if (std::binary_search(scale.begin(), scale.end(), chroma_of(p))) letters.push_back(p);
        }
        if (letters.empty()) continue;
        const auto w = letter_weights(letters.size(), spec.dist, spec.exponent, rng);
        std::vector<int> pitch;
        for (int i = 0; i < spec.length; ++i) pitch.push_back(letters[rng.weighted(w)]);
        return make_pitch_sample(std::move(pitch));
      }
      case PitchFamily::I: {
        std::vector<int> letters;
        for (int d = -spec.alphabet; d <= spec.alphabet; ++d) letters.push_back(d);
        const auto w = letter_weights(letters.size(), spec.dist, spec.exponent, rng);
        auto pitch = detail::interval_walk(letters, w, spec.length, spec.interval_tries, rng,
                                           [&](int p) { return std::abs(p) <= hw; });
        if (pitch) return make_pitch_sample(std::move(*pitch));
        break;
      }
      case PitchFamily::IS: {
        const auto scale = detail::random_scale(spec.alphabet, true, rng);
        std::vector<int> letters;
        for (int d = -2 * hw; d <= 2 * hw; ++d) letters.push_back(d);
        const auto w = letter_weights(letters.size(), spec.dist, spec.exponent, rng);
        auto pitch = detail::interval_walk(letters, w, spec.length, spec.interval_tries, rng, [&](int p) {
          return std::abs(p) <= hw && std::binary_search(scale.begin(), scale.end(), chroma_of(p));
        });
        if (pitch) return make_pitch_sample(std::move(*pitch));
        break;
      }
    }
  }
  throw DegenerateInputError("pitch model " + spec.name() + " found no legal sequence after " +
                             std::to_string(spec.sequence_retries) + " attempts");
}

/// `n` sequences; sequence i uses its own stream derived from `seed` and i.
inline std::vector<PitchSample> generate_pitch_sequences(const PitchModelSpec& spec, std::size_t n,
                                                         std::uint64_t seed, unsigned threads = 1) {
  std::vector<PitchSample> out(n);
  parallel_for(n, threads, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    out[i] = generate_pitch_sequence(spec, rng);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Rhythm models
// ---------------------------------------------------------------------------

enum class RhythmValueSet { SimpleIOI, ComplexIOI, SimpleRatio, ComplexRatio };

struct RhythmModelSpec {
  RhythmValueSet value_set = RhythmValueSet::SimpleIOI;
  LetterDist dist = LetterDist::Metrical;
  int alphabet = 4;
  int length = 30;  // IOIs per sequence
  double exponent = 2.0;

  bool simple() const {
    return value_set == RhythmValueSet::SimpleIOI || value_set == RhythmValueSet::SimpleRatio;
  }
  bool draws_ratios() const {
    return value_set == RhythmValueSet::SimpleRatio || value_set == RhythmValueSet::ComplexRatio;
  }
  std::string name() const {
    return std::string(simple() ? "S" : "C") + (draws_ratios() ? "R" : "I") +
           std::to_string(static_cast<int>(dist));
  }
};

inline RhythmModelSpec parse_rhythm_model(std::string_view name) {
  if (name.size() != 3 || (name[0] != 'S' && name[0] != 'C') || (name[1] != 'I' && name[1] != 'R') ||
      name[2] < '1' || name[2] > '4') {
    throw ParameterError("unknown rhythm model \"" + std::string(name) + "\"");
  }
  RhythmModelSpec spec;
  const bool simple = name[0] == 'S';
  const bool ratio = name[1] == 'R';
  spec.value_set = simple ? (ratio ? RhythmValueSet::SimpleRatio : RhythmValueSet::SimpleIOI)
                          : (ratio ? RhythmValueSet::ComplexRatio : RhythmValueSet::ComplexIOI);
  spec.dist = static_cast<LetterDist>(name[2] - '0');
  return spec;
}

inline std::vector<std::string> rhythm_model_names() {
  std::vector<std::string> out;
  for (const char* set : {"SI", "CI", "SR", "CR"}) {
    for (char d = '1'; d <= '4'; ++d) out.push_back(std::string(set) + d);
  }
  return out;
}

/// First `count` primes.
inline std::vector<std::int64_t> first_primes(std::size_t count) {
  std::vector<std::int64_t> primes;
  for (std::int64_t c = 2; primes.size() < count; ++c) {
    bool prime = true;
    for (std::int64_t p : primes) {
      if (p * p > c) break;
      if (c % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(c);
  }
  return primes;
}

/// Exact rhythm value as prime exponents: index k holds the exponent of the
/// k-th prime. Products of many complex values overflow 64-bit rationals,
/// exponent vectors do not.
using PrimeExponents = std::vector<int>;

namespace detail {

inline PrimeExponents trimmed(PrimeExponents e) {
  while (!e.empty() && e.back() == 0) e.pop_back();
  return e;
}

inline PrimeExponents add_exponents(const PrimeExponents& a, const PrimeExponents& b, int sign) {
  PrimeExponents out(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += sign * b[i];
  return trimmed(std::move(out));
}

inline double exponents_value(const PrimeExponents& e) {
  const auto primes = first_primes(e.size());
  double v = 1.0;
  for (std::size_t i = 0; i < e.size(); ++i) v *= std::pow(static_cast<double>(primes[i]), e[i]);
  return v;
}

/// Prime exponent form of a positive rational whose factors are among the
/// first `n_primes` primes.
inline PrimeExponents to_exponents(Rational r, std::size_t n_primes) {
  const auto primes = first_primes(n_primes);
  PrimeExponents e(n_primes, 0);
  std::int64_t num = r.numerator();
  std::int64_t den = r.denominator();
  for (std::size_t i = 0; i < n_primes; ++i) {
    while (num % primes[i] == 0) {
      num /= primes[i];
      ++e[i];
    }
    while (den % primes[i] == 0) {
      den /= primes[i];
      --e[i];
    }
  }
  if (num != 1 || den != 1) throw ParameterError("rhythm value has a prime factor outside the table");
  return trimmed(std::move(e));
}

}  // namespace detail

/// Letter values sorted ascending. Simple: 2^(i-k), i = 0..A-1, with
/// k = (A-1)/2 so the middle value is 1. Complex: 1 together with
/// 2, 1/3, 5, 1/7, 11, ... (primes, every second one inverted). Each prime
/// appears once, so every ordered pair of values has a distinct ratio.
inline std::vector<Rational> rhythm_value_set(bool simple, int alphabet) {
  if (alphabet < 1) throw ParameterError("rhythm value set needs A >= 1");
  std::vector<Rational> values;
  if (simple) {
    const int k = (alphabet - 1) / 2;
    for (int i = 0; i < alphabet; ++i) {
      const int e = i - k;
      if (e > 60 || e < -60) throw ParameterError("simple rhythm alphabet too large");
      values.push_back(e >= 0 ? Rational(std::int64_t{1} << e) : Rational(1, std::int64_t{1} << -e));
    }
  } else {
    values.push_back(Rational(1));
    const auto primes = first_primes(static_cast<std::size_t>(alphabet - 1));
    for (std::size_t i = 0; i < primes.size(); ++i) {
      values.push_back(i % 2 == 0 ? Rational(primes[i]) : Rational(1, primes[i]));
    }
  }
  std::sort(values.begin(), values.end());
  return values;
}

struct RhythmSample {
  std::vector<PrimeExponents> ioi;
  std::vector<PrimeExponents> ioi_ratio;
  std::vector<double> ioi_values;  // numeric IOI, quarter notes
};

/// Metrical weight of an onset in a 4/4 grid of quarter-note beats: 4 on the
/// downbeat, 3 on beat three, 2 on beats two and four, 1 off the beat.
inline double metrical_weight(double onset) {
  const double nearest = std::round(onset);
  if (std::abs(onset - nearest) > 1e-9 * std::max(1.0, std::abs(onset))) return 1.0;
  const auto beat = static_cast<std::int64_t>(nearest);
  switch (((beat % 4) + 4) % 4) {
    case 0: return 4.0;
    case 2: return 3.0;
    default: return 2.0;
  }
}

/// IOI families draw L IOIs directly; ratio families draw L-1 ratios and
/// rebuild IOIs from an initial IOI of 1. Metrical weighting scores each
/// candidate by the onset it would place the following note on.
inline RhythmSample generate_rhythm_sequence(const RhythmModelSpec& spec, Rng& rng) {
  if (spec.length < 2) throw ParameterError("rhythm model needs L >= 2");
  const auto values = rhythm_value_set(spec.simple(), spec.alphabet);
  const std::size_t n_primes = std::max<std::size_t>(1, static_cast<std::size_t>(spec.alphabet));
  std::vector<PrimeExponents> letters;
  std::vector<double> letter_values;
  for (const auto& v : values) {
    letters.push_back(detail::to_exponents(v, n_primes));
    letter_values.push_back(to_double(v));
  }
  const LetterDist base = spec.dist == LetterDist::Metrical ? LetterDist::Uniform : spec.dist;
  const auto base_w = letter_weights(letters.size(), base, spec.exponent, rng);

  RhythmSample s;
  double onset = 0.0;
  std::vector<double> w(letters.size());
  auto pick = [&](auto next_ioi_value) {
    for (std::size_t j = 0; j < letters.size(); ++j) {
      w[j] = spec.dist == LetterDist::Metrical
                 ? std::pow(metrical_weight(onset + next_ioi_value(j)), spec.exponent)
                 : base_w[j];
    }
    return rng.weighted(w);
  };
  if (!spec.draws_ratios()) {
    for (int i = 0; i < spec.length; ++i) {
      const std::size_t j = pick([&](std::size_t k) { return letter_values[k]; });
      s.ioi.push_back(letters[j]);
      s.ioi_values.push_back(letter_values[j]);
      onset += letter_values[j];
    }
    for (std::size_t i = 1; i < s.ioi.size(); ++i) {
      s.ioi_ratio.push_back(detail::add_exponents(s.ioi[i], s.ioi[i - 1], -1));
    }
  } else {
    s.ioi.push_back({});
    s.ioi_values.push_back(1.0);
    onset = 1.0;
    for (int i = 1; i < spec.length; ++i) {
      const double prev = s.ioi_values.back();
      const std::size_t j = pick([&](std::size_t k) { return prev * letter_values[k]; });
      s.ioi_ratio.push_back(letters[j]);
      s.ioi.push_back(detail::add_exponents(s.ioi.back(), letters[j], +1));
      s.ioi_values.push_back(prev * letter_values[j]);
      onset += s.ioi_values.back();
    }
  }
  return s;
}

inline std::vector<RhythmSample> generate_rhythm_sequences(const RhythmModelSpec& spec, std::size_t n,
                                                           std::uint64_t seed, unsigned threads = 1) {
  std::vector<RhythmSample> out(n);
  parallel_for(n, threads, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    out[i] = generate_rhythm_sequence(spec, rng);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Fitting by grid search on Jensen-Shannon divergence
// ---------------------------------------------------------------------------

struct RatioAxis {
  double lo = 0.0;
  double hi = 5.0;
  double bin_width = 0.02;
  std::size_t bins() const { return static_cast<std::size_t>(std::llround((hi - lo) / bin_width)); }
};

/// Per-melody entropy ratios H(MInt)/H(Chroma) and H(SInt)/H(Chroma),
/// defined where H(Chroma) > 0.
struct PitchTargets {
  std::vector<double> mint_ratio;
  std::vector<double> sint_ratio;
  bool empty() const { return mint_ratio.empty(); }
};

inline void add_pitch_ratios(PitchTargets& t, std::span<const int> chroma, std::span<const int> mint,
                             std::span<const int> sint) {
  if (chroma.empty() || mint.empty() || sint.empty()) return;
  const double hc = sequence_entropy<int>(chroma);
  if (!(hc > 0.0)) return;
  t.mint_ratio.push_back(sequence_entropy<int>(mint) / hc);
  t.sint_ratio.push_back(sequence_entropy<int>(sint) / hc);
}

inline PitchTargets pitch_targets(const std::vector<Corpus>& corpora) {
  PitchTargets t;
  for (const auto& c : corpora) {
    for (const auto& m : c.melodies) {
      const auto pitch = pitches_of(m);
      const auto chroma = to_chroma(pitch);
      add_pitch_ratios(t, chroma, differences<int>(pitch), differences<int>(to_scale_degrees(chroma)));
    }
  }
  return t;
}

inline PitchTargets pitch_targets(const std::vector<PitchSample>& samples) {
  PitchTargets t;
  for (const auto& s : samples) add_pitch_ratios(t, s.chroma, s.mint, s.sint);
  return t;
}

/// Per-melody H(IOI) and H(IOIRatio)/H(IOI), defined where H(IOI) > 0.
struct RhythmTargets {
  std::vector<double> h_ioi;
  std::vector<double> ratio;
  bool empty() const { return h_ioi.empty(); }
};

template <typename T>
void add_rhythm_ratio(RhythmTargets& t, std::span<const T> ioi, std::span<const T> ioi_ratio) {
  if (ioi.empty() || ioi_ratio.empty()) return;
  const double h = sequence_entropy<T>(ioi);
  if (!(h > 0.0)) return;
  t.h_ioi.push_back(h);
  t.ratio.push_back(sequence_entropy<T>(ioi_ratio) / h);
}

inline RhythmTargets rhythm_targets(const std::vector<Corpus>& corpora) {
  RhythmTargets t;
  for (const auto& c : corpora) {
    for (const auto& m : c.melodies) {
      try {
        const auto ioi = iois_of(m);
        const auto ratio = successive_ratios(ioi, "IOI", m.id);
        add_rhythm_ratio<Rational>(t, ioi, ratio);
      } catch (const DegenerateInputError&) {
      }
    }
  }
  return t;
}

inline RhythmTargets rhythm_targets(const std::vector<RhythmSample>& samples) {
  RhythmTargets t;
  for (const auto& s : samples) add_rhythm_ratio<PrimeExponents>(t, s.ioi, s.ioi_ratio);
  return t;
}

/// JSD[H(MInt)/H(Chroma)] + JSD[H(SInt)/H(Chroma)]; 2 when the model
/// produced no defined ratio.
inline double pitch_objective(const PitchTargets& empirical, const PitchTargets& model, const RatioAxis& axis) {
  if (empirical.empty()) throw ParameterError("pitch fit needs non-empty empirical targets");
  if (model.empty()) return 2.0;
  const std::size_t b = axis.bins();
  return jsd(histogram(empirical.mint_ratio, axis.lo, axis.bin_width, b),
             histogram(model.mint_ratio, axis.lo, axis.bin_width, b)) +
         jsd(histogram(empirical.sint_ratio, axis.lo, axis.bin_width, b),
             histogram(model.sint_ratio, axis.lo, axis.bin_width, b));
}

/// Expected JSD between empirical and model P(ratio | H(IOI) bin), weighted
/// by the empirical P(H(IOI) bin). A bin the model never reaches scores 1.
inline double rhythm_objective(const RhythmTargets& empirical, const RhythmTargets& model, const RatioAxis& axis,
                               double entropy_bin_width) {
  if (empirical.empty()) throw ParameterError("rhythm fit needs non-empty empirical targets");
  if (!(entropy_bin_width > 0.0)) throw ParameterError("entropy bin width must be positive");
  auto bin_of = [&](double h) { return static_cast<long>(std::floor(h / entropy_bin_width)); };
  std::map<long, std::vector<double>> emp, mod;
  for (std::size_t i = 0; i < empirical.h_ioi.size(); ++i) emp[bin_of(empirical.h_ioi[i])].push_back(empirical.ratio[i]);
  for (std::size_t i = 0; i < model.h_ioi.size(); ++i) mod[bin_of(model.h_ioi[i])].push_back(model.ratio[i]);
  const std::size_t b = axis.bins();
  const double total = static_cast<double>(empirical.h_ioi.size());
  double expected = 0.0;
  for (const auto& [bin, ratios] : emp) {
    const double weight = static_cast<double>(ratios.size()) / total;
    const auto it = mod.find(bin);
    const double d = it == mod.end() ? 1.0
                                     : jsd(histogram(ratios, axis.lo, axis.bin_width, b),
                                           histogram(it->second, axis.lo, axis.bin_width, b));
    expected += weight * d;
  }
  return expected;
}

struct PitchGrid {
  std::vector<int> alphabet{3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  std::vector<int> length{15, 20, 25, 30, 35, 40, 45, 50};
  std::vector<double> range{1.0, 2.0, 3.0};
  std::vector<double> exponent{0.5, 1.0, 2.0, 3.0};
};

struct RhythmGrid {
  std::vector<int> alphabet{2, 3, 4, 5, 6, 8, 10, 12, 16, 20};  // pooled per setting
  std::vector<int> length{15, 20, 25, 30, 35, 40, 45, 50};
  std::vector<double> exponent{0.5, 1.0, 2.0, 3.0};
};

struct FitOptions {
  std::size_t n_per_setting = 100;
  RatioAxis axis{};
  double entropy_bin_width = 0.25;
  unsigned threads = 1;
};

template <typename Spec>
struct FitResult {
  Spec best;
  double score = std::numeric_limits<double>::infinity();
  std::vector<std::pair<Spec, double>> evaluated;  // grid order
};

/// Grid search over (A, L, O, exponent) in that lexicographic order; ties
/// keep the earliest grid point. Uniform models ignore the exponent axis.
inline FitResult<PitchModelSpec> fit_pitch_model(const PitchModelSpec& family, const PitchTargets& empirical,
                                                 const PitchGrid& grid, const FitOptions& opt, std::uint64_t seed) {
  if (empirical.empty()) throw ParameterError("pitch fit needs non-empty empirical targets");
  std::vector<PitchModelSpec> points;
  const std::vector<double> exponents =
      family.dist == LetterDist::Uniform ? std::vector<double>{grid.exponent.empty() ? 0.0 : grid.exponent.front()}
                                         : grid.exponent;
  for (int a : grid.alphabet) {
    for (int l : grid.length) {
      for (double o : grid.range) {
        for (double e : exponents) {
          PitchModelSpec s = family;
          s.alphabet = a;
          s.length = l;
          s.range = o;
          s.exponent = e;
          points.push_back(s);
        }
      }
    }
  }
  if (points.empty()) throw ParameterError("empty parameter grid");
  std::vector<double> scores(points.size());
  const std::uint64_t family_seed = derive_seed(seed, stable_hash(family.name()));
  parallel_for(points.size(), opt.threads, [&](std::size_t i) {
    std::vector<PitchSample> samples(opt.n_per_setting);
    for (std::size_t k = 0; k < opt.n_per_setting; ++k) {
      Rng rng(derive_seed(derive_seed(family_seed, i), k));
      samples[k] = generate_pitch_sequence(points[i], rng);
    }
    scores[i] = pitch_objective(empirical, pitch_targets(samples), opt.axis);
  });
  FitResult<PitchModelSpec> r;
  for (std::size_t i = 0; i < points.size(); ++i) {
    r.evaluated.emplace_back(points[i], scores[i]);
    if (scores[i] < r.score) {
      r.score = scores[i];
      r.best = points[i];
    }
  }
  return r;
}

/// Grid search over (L, exponent); each setting pools `n_per_setting`
/// sequences for every alphabet size in the grid.
inline FitResult<RhythmModelSpec> fit_rhythm_model(const RhythmModelSpec& family, const RhythmTargets& empirical,
                                                   const RhythmGrid& grid, const FitOptions& opt,
                                                   std::uint64_t seed) {
  if (empirical.empty()) throw ParameterError("rhythm fit needs non-empty empirical targets");
  if (grid.alphabet.empty()) throw ParameterError("rhythm grid needs at least one alphabet size");
  std::vector<RhythmModelSpec> points;
  const std::vector<double> exponents =
      family.dist == LetterDist::Uniform ? std::vector<double>{grid.exponent.empty() ? 0.0 : grid.exponent.front()}
                                         : grid.exponent;
  for (int l : grid.length) {
    for (double e : exponents) {
      RhythmModelSpec s = family;
      s.length = l;
      s.exponent = e;
      points.push_back(s);
    }
  }
  if (points.empty()) throw ParameterError("empty parameter grid");
  std::vector<double> scores(points.size());
  const std::uint64_t family_seed = derive_seed(seed, stable_hash(family.name()));
  parallel_for(points.size(), opt.threads, [&](std::size_t i) {
    std::vector<RhythmSample> samples;
    std::uint64_t k = 0;
    for (int a : grid.alphabet) {
      RhythmModelSpec s = points[i];
      s.alphabet = a;
      for (std::size_t rep = 0; rep < opt.n_per_setting; ++rep) {
        Rng rng(derive_seed(derive_seed(family_seed, i), k++));
        samples.push_back(generate_rhythm_sequence(s, rng));
      }
    }
    scores[i] = rhythm_objective(empirical, rhythm_targets(samples), opt.axis, opt.entropy_bin_width);
  });
  FitResult<RhythmModelSpec> r;
  for (std::size_t i = 0; i < points.size(); ++i) {
    r.evaluated.emplace_back(points[i], scores[i]);
    if (scores[i] < r.score) {
      r.score = scores[i];
      r.best = points[i];
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Scale-entropy simulation
// ---------------------------------------------------------------------------

struct ScaleSimOptions {
  /// Pitch window width in semitones per unit of O, centred on the start pitch.
  double semitones_per_range = 12.0;
  std::size_t interval_tries = 100;
  std::size_t sequence_retries = 1000;
  unsigned threads = 1;
  std::string length_source = "L_NR";
  std::string interval_source = "empirical";
};

struct ScaleSimResult {
  std::map<int, std::vector<double>> per_alphabet;  // A -> H(Chroma) samples
  std::size_t n_sequences = 0;
  std::vector<double> range_values;
  std::string length_source;
  std::string interval_source;

  std::size_t samples(int a) const {
    const auto it = per_alphabet.find(a);
    return it == per_alphabet.end() ? 0 : it->second.size();
  }
  /// Fraction of A-degree sequences with H(Chroma) < threshold.
  double fraction_below(int a, double threshold) const {
    const auto it = per_alphabet.find(a);
    if (it == per_alphabet.end() || it->second.empty()) return 0.0;
    const auto below = std::count_if(it->second.begin(), it->second.end(), [&](double h) { return h < threshold; });
    return static_cast<double>(below) / static_cast<double>(it->second.size());
  }
};

/// Sequence i draws O from `range_values` in rotation (i mod |O|), a length
/// L from `lengths`, and L intervals from `intervals`; the pitch walk starts
/// at 0 and stays inside a window 12 * O semitones wide. The chroma
/// alphabet size and entropy of each walk are recorded. Each sequence has
/// its own random stream, so the result does not depend on `threads`.
inline ScaleSimResult simulate_scale_entropy(const Distribution<int>& intervals, const Distribution<int>& lengths,
                                             const std::vector<double>& range_values, std::size_t n_sequences,
                                             std::uint64_t seed, const ScaleSimOptions& opt = {}) {
  if (range_values.empty()) throw ParameterError("scale simulation needs at least one O value");
  for (int l : lengths.alphabet) {
    if (l < 1) throw ParameterError("melody lengths must be positive");
  }
  ScaleSimResult result;
  result.n_sequences = n_sequences;
  result.range_values = range_values;
  result.length_source = opt.length_source;
  result.interval_source = opt.interval_source;

  constexpr std::size_t kChunk = std::size_t{1} << 18;
  std::vector<std::pair<int, double>> chunk;
  for (std::size_t base = 0; base < n_sequences; base += kChunk) {
    const std::size_t count = std::min(kChunk, n_sequences - base);
    chunk.assign(count, {0, 0.0});
    parallel_for(count, opt.threads, [&](std::size_t k) {
      const std::size_t i = base + k;
      Rng rng(derive_seed(seed, i));
      const double o = range_values[i % range_values.size()];
      const int half = static_cast<int>(std::floor(0.5 * o * opt.semitones_per_range + 1e-9));
      const int length = lengths.alphabet[rng.weighted(lengths.probs)];
      for (std::size_t attempt = 0; attempt < opt.sequence_retries; ++attempt) {
        std::vector<int> pitch{0};
        bool ok = true;
        for (int step = 0; step < length && ok; ++step) {
          ok = false;
          for (std::size_t t = 0; t < opt.interval_tries; ++t) {
            const int next = pitch.back() + intervals.alphabet[rng.weighted(intervals.probs)];
            if (std::abs(next) <= half) {
              pitch.push_back(next);
              ok = true;
              break;
            }
          }
        }
        if (!ok) continue;
        const auto chroma = to_chroma(pitch);
        const auto d = distribution_of<int>(chroma);
        chunk[k] = {static_cast<int>(d.size()), entropy(d)};
        return;
      }
      throw DegenerateInputError("interval distribution cannot stay inside a window of O=" + std::to_string(o));
    });
    for (const auto& [a, h] : chunk) result.per_alphabet[a].push_back(h);
  }
  return result;
}

struct ScaleLikelihood {
  std::map<int, double> log_likelihood;  // bits per melody
  std::map<int, std::size_t> n_samples;
  std::vector<int> unreliable;  // fewer than min_samples, excluded
};

/// log L(A) = sum over bins of Q_A(H) log2 P'(H) dH on [0, 5] bits, where
/// P' = alpha P + (1 - alpha)/5 and P, Q_A are Silverman-bandwidth Gaussian
/// KDEs of the empirical and simulated H(Chroma) values.
inline ScaleLikelihood scale_loglikelihood(const ScaleSimResult& sim, std::span<const double> empirical_h,
                                           double alpha = 0.999, double bin_width = 0.005,
                                           std::size_t min_samples = 30) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in (0, 1]");
  if (empirical_h.empty()) throw ParameterError("scale likelihood needs empirical entropies");
  const Grid grid{0.0, 5.0, bin_width};
  auto density = [&](std::span<const double> v) {
    const bool flat = std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
    return flat ? delta_density(v.front(), grid) : kde_silverman(v, grid);
  };
  const GridDensity p = density(empirical_h);
  const double span = grid.hi - grid.lo;
  std::vector<double> log_prior(p.density.size());
  for (std::size_t j = 0; j < log_prior.size(); ++j) {
    log_prior[j] = std::log2(alpha * p.density[j] + (1.0 - alpha) / span);
  }
  ScaleLikelihood out;
  for (const auto& [a, samples] : sim.per_alphabet) {
    if (samples.size() < min_samples) {
      out.unreliable.push_back(a);
      continue;
    }
    const GridDensity q = density(samples);
    double ll = 0.0;
    for (std::size_t j = 0; j < q.density.size(); ++j) {
      if (q.density[j] > 0.0) ll += q.density[j] * log_prior[j] * grid.bin_width;
    }
    out.log_likelihood[a] = ll;
    out.n_samples[a] = samples.size();
  }
  return out;
}

}  // namespace melic
