#pragma once

// Unigram information measures over categorical sequences. All logs are
// base 2 and entropies use the plug-in estimator.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "melic/error.hpp"
#include "melic/random.hpp"
#include "melic/viewpoints.hpp"

namespace melic {

/// Empirical symbol distribution; alphabet sorted ascending.
template <typename T>
struct Distribution {
  std::vector<T> alphabet;
  std::vector<double> probs;
  std::vector<std::size_t> counts;  // empty when built from probabilities

  std::size_t size() const noexcept { return alphabet.size(); }
};

template <typename T>
Distribution<T> distribution_of(std::span<const T> seq) {
  if (seq.empty()) throw DegenerateInputError("distribution of an empty sequence");
  std::map<T, std::size_t> counts;
  for (const T& s : seq) ++counts[s];
  Distribution<T> d;
  for (const auto& [sym, n] : counts) {
    d.alphabet.push_back(sym);
    d.counts.push_back(n);
    d.probs.push_back(static_cast<double>(n) / static_cast<double>(seq.size()));
  }
  return d;
}

inline Distribution<Symbol> distribution_of(const ViewpointSequence& seq) {
  return distribution_of<Symbol>(seq.symbols);
}

/// Builds a distribution from explicit probabilities (normalised on entry).
template <typename T>
Distribution<T> make_distribution(std::vector<T> alphabet, std::vector<double> probs) {
  if (alphabet.empty() || alphabet.size() != probs.size()) {
    throw ParameterError("distribution needs matching, non-empty alphabet and probabilities");
  }
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw ParameterError("probabilities must be finite and >= 0");
    total += p;
  }
  if (total <= 0.0) throw ParameterError("probabilities sum to zero");
  std::vector<std::size_t> order(alphabet.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return alphabet[a] < alphabet[b]; });
  Distribution<T> d;
  for (std::size_t i : order) {
    if (!d.alphabet.empty() && !(d.alphabet.back() < alphabet[i])) {
      throw ParameterError("duplicate symbol in distribution");
    }
    d.alphabet.push_back(alphabet[i]);
    d.probs.push_back(probs[i] / total);
  }
  return d;
}

inline double entropy_of_probs(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

inline double entropy_of_counts(std::span<const std::size_t> counts) {
  std::size_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) return 0.0;
  double h = 0.0;
  const double n = static_cast<double>(total);
  for (auto c : counts) {
    if (c > 0) {
      const double p = static_cast<double>(c) / n;
      h -= p * std::log2(p);
    }
  }
  return h;
}

template <typename T>
double entropy(const Distribution<T>& d) {
  return entropy_of_probs(d.probs);
}

/// Lorenz-curve Gini: 1 - (2/A) * sum of the ascending cumulative
/// probabilities + 1/A. Zero for a uniform distribution, (A-1)/A at most.
/// Evaluated in the equivalent form sum_j (2j - A + 1) p_(j) / A, pairing
/// sorted entries from both ends so equal probabilities cancel exactly.
inline double gini_of_probs(std::span<const double> probs) {
  const std::size_t a = probs.size();
  if (a <= 1) return 0.0;
  std::vector<double> sorted(probs.begin(), probs.end());
  std::sort(sorted.begin(), sorted.end());
  double total = 0.0;
  for (double p : sorted) total += p;
  double acc = 0.0;
  for (std::size_t j = 0; j < a / 2; ++j) {
    acc += static_cast<double>(a - 1 - 2 * j) * (sorted[a - 1 - j] - sorted[j]);
  }
  return std::max(0.0, acc / (static_cast<double>(a) * total));
}

template <typename T>
double gini(const Distribution<T>& d) {
  return gini_of_probs(d.probs);
}

struct InfoSummary {
  double entropy_bits = 0.0;
  std::size_t alphabet_size = 0;
  double gini = 0.0;
};

template <typename T>
InfoSummary summarize(const Distribution<T>& d) {
  return {entropy(d), d.size(), gini(d)};
}

inline InfoSummary summarize(const ViewpointSequence& seq) { return summarize(distribution_of(seq)); }

template <typename T>
double sequence_entropy(std::span<const T> seq) {
  return entropy(distribution_of<T>(seq));
}

// ---------------------------------------------------------------------------
// Mutual information with a shuffle null
// ---------------------------------------------------------------------------

/// Plug-in I(P;R) = H(P) + H(R) - H(P,R), clamped at zero.
template <typename A, typename B>
double mutual_information(std::span<const A> p, std::span<const B> r) {
  if (p.size() != r.size()) throw ParameterError("mutual information needs equal-length sequences");
  if (p.empty()) throw DegenerateInputError("mutual information of empty sequences");
  std::vector<std::pair<A, B>> joint;
  joint.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) joint.emplace_back(p[i], r[i]);
  const double i_pr = sequence_entropy<A>(p) + sequence_entropy<B>(r) -
                      sequence_entropy<std::pair<A, B>>(joint);
  return std::max(0.0, i_pr);
}

struct MutualInformation {
  double observed = 0.0;  // I
  double shuffled = 0.0;  // I_ran
  double excess = 0.0;    // I* = I - I_ran
};

/// I_ran averages the MI over `n_shuffles` Fisher-Yates permutations of `r`.
template <typename A, typename B>
MutualInformation mutual_information_excess(std::span<const A> p, std::span<const B> r, std::size_t n_shuffles,
                                            Rng& rng) {
  MutualInformation out;
  out.observed = mutual_information<A, B>(p, r);
  if (n_shuffles > 0) {
    std::vector<B> permuted(r.begin(), r.end());
    double total = 0.0;
    for (std::size_t k = 0; k < n_shuffles; ++k) {
      rng.shuffle(std::span<B>(permuted));
      total += mutual_information<A, B>(p, permuted);
    }
    out.shuffled = total / static_cast<double>(n_shuffles);
  }
  out.excess = out.observed - out.shuffled;
  return out;
}

inline MutualInformation mutual_information_excess(const ViewpointSequence& p, const ViewpointSequence& r,
                                                   std::size_t n_shuffles, Rng& rng) {
  return mutual_information_excess<Symbol, Symbol>(p.symbols, r.symbols, n_shuffles, rng);
}

// ---------------------------------------------------------------------------
// Entropy bounds
// ---------------------------------------------------------------------------

/// Entropy of the count vector [L - A + 1, 1, ..., 1]: one symbol carries all
/// the repetition, every other symbol appears once.
inline double entropy_lower_bound(std::size_t alphabet, std::size_t length) {
  if (alphabet < 1 || alphabet > length) {
    throw ParameterError("entropy_lower_bound needs 1 <= A <= L");
  }
  std::vector<std::size_t> counts(alphabet, 1);
  counts[0] = length - alphabet + 1;
  return entropy_of_counts(counts);
}

struct PowerLawInfo {
  double entropy_bits = 0.0;
  double gini = 0.0;
};

/// p_i proportional to i^(-exponent) for i = 1..A.
inline std::vector<double> powerlaw_probs(std::size_t alphabet, double exponent) {
  if (alphabet < 1) throw ParameterError("power law needs A >= 1");
  std::vector<double> p(alphabet);
  double total = 0.0;
  for (std::size_t i = 0; i < alphabet; ++i) {
    p[i] = std::exp(-exponent * std::log(static_cast<double>(i + 1)));
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

inline PowerLawInfo powerlaw_entropy_gini(std::size_t alphabet, double exponent) {
  const auto p = powerlaw_probs(alphabet, exponent);
  return {entropy_of_probs(p), gini_of_probs(p)};
}

/// Entropy of the A-letter power law whose Gini equals `target_gini`;
/// the exponent is found by bisection to 1e-8 in G.
inline double solve_powerlaw_entropy(std::size_t alphabet, double target_gini) {
  if (alphabet < 1) throw ParameterError("power law needs A >= 1");
  const double n = static_cast<double>(alphabet);
  const double g_max = (n - 1.0) / n;
  if (alphabet == 1 && target_gini == 0.0) return 0.0;
  if (!(target_gini >= 0.0) || target_gini >= g_max) {
    throw ParameterError("Gini " + std::to_string(target_gini) + " outside the achievable range [0, " +
                         std::to_string(g_max) + ") for A=" + std::to_string(alphabet));
  }
  double lo = 0.0;
  double hi = 1.0;
  while (powerlaw_entropy_gini(alphabet, hi).gini < target_gini) {
    hi *= 2.0;
    if (hi > 1e6) throw ParameterError("Gini target too close to its supremum");
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double g = powerlaw_entropy_gini(alphabet, mid).gini;
    if (std::abs(g - target_gini) <= 1e-8) return powerlaw_entropy_gini(alphabet, mid).entropy_bits;
    (g < target_gini ? lo : hi) = mid;
  }
  return powerlaw_entropy_gini(alphabet, 0.5 * (lo + hi)).entropy_bits;
}

// ---------------------------------------------------------------------------
// Entropy-ratio bound families
// ---------------------------------------------------------------------------

struct RatioBound {
  std::string family;
  std::size_t length = 0;
  std::vector<int> pitches;
  double h_pitch = 0.0;
  double h_chroma = 0.0;
  double h_mint = 0.0;
  /// H(Pitch)/H(MInt) and H(Chroma)/H(MInt); empty when H(MInt) = 0.
  std::optional<double> pitch_ratio;
  std::optional<double> chroma_ratio;
};

/// Builds the three extremal pitch families at length L and measures them:
/// a constant-interval climb, a chromatic up-down alternation and a
/// stop-start wave whose amplitude grows every cycle.
inline std::vector<RatioBound> entropy_ratio_bounds(std::size_t length) {
  if (length < 3) throw ParameterError("entropy_ratio_bounds needs L >= 3");
  std::vector<RatioBound> out;
  auto measure = [&](std::string family, std::vector<int> pitches) {
    RatioBound b;
    b.family = std::move(family);
    b.length = pitches.size();
    b.h_pitch = sequence_entropy<int>(pitches);
    b.h_chroma = sequence_entropy<int>(to_chroma(pitches));
    b.h_mint = sequence_entropy<int>(differences<int>(pitches));
    if (b.h_mint > 0.0) {
      b.pitch_ratio = b.h_pitch / b.h_mint;
      b.chroma_ratio = b.h_chroma / b.h_mint;
    }
    b.pitches = std::move(pitches);
    out.push_back(std::move(b));
  };
  std::vector<int> climb(length), chromatic(length), wave(length);
  for (std::size_t i = 0; i < length; ++i) {
    climb[i] = static_cast<int>(i);
    chromatic[i] = static_cast<int>(i % 2);
    wave[i] = i % 2 == 0 ? 0 : static_cast<int>(i / 2 + 1);
  }
  measure("climb", std::move(climb));
  measure("chromatic", std::move(chromatic));
  measure("wave", std::move(wave));
  return out;
}

}  // namespace melic
