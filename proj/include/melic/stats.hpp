#pragma once

// Statistical routines: kernel density estimation, Jensen-Shannon
// divergence, Pearson correlation, Benjamini-Hochberg, resampling nulls,
// rhythm deviation profiles and n-gram melodic similarity.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "melic/corpus.hpp"
#include "melic/error.hpp"
#include "melic/infotheory.hpp"
#include "melic/random.hpp"
#include "melic/table.hpp"
#include "melic/viewpoints.hpp"

namespace melic {

// ---------------------------------------------------------------------------
// Descriptive helpers
// ---------------------------------------------------------------------------

inline double mean_of(std::span<const double> v) {
  if (v.empty()) throw DegenerateInputError("mean of an empty sample");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// Variance with divisor n - ddof.
inline double variance_of(std::span<const double> v, std::size_t ddof = 1) {
  if (v.size() <= ddof) throw DegenerateInputError("variance needs more samples");
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return ss / static_cast<double>(v.size() - ddof);
}

/// Linearly interpolated quantile (the common "type 7" definition).
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw DegenerateInputError("quantile of an empty sample");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

// ---------------------------------------------------------------------------
// Kernel density estimation on a fixed grid
// ---------------------------------------------------------------------------

struct Grid {
  double lo = 0.0;
  double hi = 5.0;
  double bin_width = 0.005;

  std::size_t bins() const {
    if (!(hi > lo) || !(bin_width > 0.0)) throw ParameterError("grid needs hi > lo and bin_width > 0");
    return static_cast<std::size_t>(std::llround((hi - lo) / bin_width));
  }
  double edge(std::size_t j) const { return lo + static_cast<double>(j) * bin_width; }
  double center(std::size_t j) const { return lo + (static_cast<double>(j) + 0.5) * bin_width; }
};

/// Piecewise-constant density on a Grid.
struct GridDensity {
  Grid grid;
  std::vector<double> density;

  double integral() const {
    return std::accumulate(density.begin(), density.end(), 0.0) * grid.bin_width;
  }
  double mean() const {
    double m = 0.0;
    for (std::size_t j = 0; j < density.size(); ++j) m += grid.center(j) * density[j] * grid.bin_width;
    return m;
  }
  double at(double x) const {
    if (density.empty()) return 0.0;
    const double pos = (x - grid.lo) / grid.bin_width;
    const auto j = static_cast<std::ptrdiff_t>(std::floor(pos));
    if (j < 0 || j >= static_cast<std::ptrdiff_t>(density.size())) return 0.0;
    return density[static_cast<std::size_t>(j)];
  }
};

/// 0.9 * min(sd, IQR/1.34) * n^(-1/5); the IQR term is dropped when it is zero.
inline double silverman_bandwidth(std::span<const double> samples) {
  if (samples.size() < 2) throw DegenerateInputError("Silverman bandwidth needs at least two samples");
  const double sd = std::sqrt(variance_of(samples));
  if (!(sd > 0.0)) {
    throw DegenerateInputError("samples have zero spread; use a delta density at the common value instead");
  }
  std::vector<double> v(samples.begin(), samples.end());
  const double iqr = quantile(v, 0.75) - quantile(v, 0.25);
  const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  return 0.9 * spread * std::pow(static_cast<double>(samples.size()), -0.2);
}

namespace detail {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Adds `weight` times the Gaussian mass of each bin around `x`; mass below
/// the grid goes to the first bin, mass above to the last.
inline void add_kernel_mass(std::vector<double>& mass, const Grid& grid, double x, double h, double weight) {
  const std::size_t n = mass.size();
  const double reach = 8.0 * h;
  const double first = std::floor((x - reach - grid.lo) / grid.bin_width);
  const double last = std::ceil((x + reach - grid.lo) / grid.bin_width);
  const std::size_t jl = static_cast<std::size_t>(std::clamp(first, 1.0, static_cast<double>(n)));
  const std::size_t jh = static_cast<std::size_t>(std::clamp(last, 1.0, static_cast<double>(n - 1)));
  // cdf at interior edges j in [jl, jh]; 0 below, 1 above.
  double prev = 0.0;
  std::size_t bin = jl - 1;
  for (std::size_t j = jl; j <= jh && j < n; ++j) {
    const double c = normal_cdf((grid.edge(j) - x) / h);
    mass[bin] += weight * (c - prev);
    prev = c;
    bin = j;
  }
  mass[bin] += weight * (1.0 - prev);
}

}  // namespace detail

/// Gaussian KDE evaluated as bin masses on `grid` (so it integrates to one
/// on the grid by construction). Large samples are pre-binned on a grid ten
/// times finer before smoothing.
inline GridDensity kde_on_grid(std::span<const double> samples, const Grid& grid, double bandwidth) {
  const std::size_t n = grid.bins();
  if (samples.empty()) throw DegenerateInputError("KDE of an empty sample");
  if (!(bandwidth > 0.0)) throw ParameterError("KDE bandwidth must be positive");
  std::vector<double> mass(n, 0.0);
  const double w = 1.0 / static_cast<double>(samples.size());
  if (samples.size() <= 20000) {
    for (double x : samples) detail::add_kernel_mass(mass, grid, x, bandwidth, w);
  } else {
    const Grid fine{grid.lo, grid.hi, grid.bin_width / 10.0};
    const std::size_t nf = fine.bins();
    std::vector<double> counts(nf, 0.0);
    for (double x : samples) {
      const double pos = std::floor((x - fine.lo) / fine.bin_width);
      const auto j = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(nf - 1)));
      counts[j] += w;
    }
    for (std::size_t j = 0; j < nf; ++j) {
      if (counts[j] > 0.0) detail::add_kernel_mass(mass, grid, fine.center(j), bandwidth, counts[j]);
    }
  }
  GridDensity out{grid, std::move(mass)};
  for (double& m : out.density) m /= grid.bin_width;
  return out;
}

inline GridDensity kde_silverman(std::span<const double> samples, const Grid& grid) {
  return kde_on_grid(samples, grid, silverman_bandwidth(samples));
}

/// All mass in the bin containing `x` (clamped to the grid).
inline GridDensity delta_density(double x, const Grid& grid) {
  const std::size_t n = grid.bins();
  GridDensity out{grid, std::vector<double>(n, 0.0)};
  const double pos = std::floor((x - grid.lo) / grid.bin_width);
  const auto j = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(n - 1)));
  out.density[j] = 1.0 / grid.bin_width;
  return out;
}

// ---------------------------------------------------------------------------
// Divergence, correlation, multiple testing
// ---------------------------------------------------------------------------

/// Jensen-Shannon divergence in bits between two histograms on the same
/// binning (each is normalised first).
inline double jsd(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ParameterError("JSD needs histograms on the same binning");
  const double sp = std::accumulate(p.begin(), p.end(), 0.0);
  const double sq = std::accumulate(q.begin(), q.end(), 0.0);
  if (!(sp > 0.0) || !(sq > 0.0)) throw DegenerateInputError("JSD of an empty histogram");
  std::vector<double> pn(p.size()), qn(q.size()), m(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    pn[i] = p[i] / sp;
    qn[i] = q[i] / sq;
    m[i] = 0.5 * (pn[i] + qn[i]);
  }
  const double d = entropy_of_probs(m) - 0.5 * (entropy_of_probs(pn) + entropy_of_probs(qn));
  return std::clamp(d, 0.0, 1.0);
}

/// Counts of `values` in bins of `bin_width` starting at `lo`; values outside
/// [lo, lo + bins * bin_width) are clamped to the end bins.
inline std::vector<double> histogram(std::span<const double> values, double lo, double bin_width, std::size_t bins) {
  std::vector<double> h(bins, 0.0);
  for (double v : values) {
    const double pos = std::floor((v - lo) / bin_width);
    h[static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(bins - 1)))] += 1.0;
  }
  return h;
}

struct Correlation {
  double r = 0.0;
  double p_two_sided = 1.0;
  std::size_t n = 0;
};

/// Product-moment r with a two-sided p from Student's t on n - 2 dof.
inline Correlation pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ParameterError("pearson needs equal-length samples");
  if (x.size() < 3) throw ParameterError("pearson needs at least three pairs");
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw DegenerateInputError("pearson of a zero-variance sample");
  Correlation c;
  c.n = x.size();
  c.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  const double dof = static_cast<double>(c.n - 2);
  if (std::abs(c.r) >= 1.0) {
    c.p_two_sided = 0.0;
  } else {
    const double t = c.r * std::sqrt(dof / (1.0 - c.r * c.r));
    const boost::math::students_t dist(dof);
    c.p_two_sided = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
  }
  return c;
}

/// Step-up procedure: rejects the k smallest p-values, k being the largest
/// rank with p_(k) <= k q / m. Flags are in input order.
inline std::vector<bool> benjamini_hochberg(std::span<const double> pvals, double q) {
  if (!(q > 0.0 && q < 1.0)) throw ParameterError("BH level q must lie in (0, 1)");
  const std::size_t m = pvals.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pvals[a] < pvals[b]; });
  std::size_t k = 0;
  for (std::size_t rank = 1; rank <= m; ++rank) {
    const double p = pvals[order[rank - 1]];
    if (p < 0.0 || p > 1.0) throw ParameterError("p-values must lie in [0, 1]");
    if (p <= static_cast<double>(rank) * q / static_cast<double>(m)) k = rank;
  }
  std::vector<bool> reject(m, false);
  for (std::size_t rank = 0; rank < k; ++rank) reject[order[rank]] = true;
  return reject;
}

// ---------------------------------------------------------------------------
// Per-corpus means and resampling nulls
// ---------------------------------------------------------------------------

struct CorpusMeans {
  std::string corpus_id;
  std::string region;
  std::string type;
  double h_chroma = 0.0;
  double h_duration = 0.0;
  double i_chroma_duration = 0.0;
  std::optional<double> i_star;

  double joint_entropy() const { return h_chroma + h_duration - i_chroma_duration; }
};

inline std::vector<Row> means_rows(const std::vector<CorpusMeans>& means) {
  std::vector<Row> rows;
  for (const auto& m : means) {
    rows.push_back({{"corpus_id", m.corpus_id},
                    {"region", m.region},
                    {"type", m.type},
                    {"H_chroma", m.h_chroma},
                    {"H_duration", m.h_duration},
                    {"I_chroma_duration", m.i_chroma_duration},
                    {"I_star", m.i_star ? Cell{*m.i_star} : Cell{std::monostate{}}}});
  }
  return rows;
}

inline std::vector<CorpusMeans> parse_means_csv(std::string_view text) {
  const CsvTable t = read_csv(text);
  const std::size_t c_id = t.column("corpus_id");
  const std::size_t c_hc = t.column("H_chroma");
  const std::size_t c_hd = t.column("H_duration");
  const std::size_t c_i = t.column("I_chroma_duration");
  auto optional_column = [&](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < t.header.size(); ++i) {
      if (t.header[i] == name) return i;
    }
    return std::nullopt;
  };
  const auto c_region = optional_column("region");
  const auto c_type = optional_column("type");
  const auto c_star = optional_column("I_star");
  auto number = [&](const std::string& s, std::size_t row) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ValidationError("means CSV row " + std::to_string(row + 1) + ": \"" + s + "\" is not a number");
    }
  };
  std::vector<CorpusMeans> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    CorpusMeans m;
    m.corpus_id = row[c_id];
    if (c_region) m.region = row[*c_region];
    if (c_type) m.type = row[*c_type];
    m.h_chroma = number(row[c_hc], r);
    m.h_duration = number(row[c_hd], r);
    m.i_chroma_duration = number(row[c_i], r);
    if (c_star && !row[*c_star].empty()) m.i_star = number(row[*c_star], r);
    out.push_back(std::move(m));
  }
  return out;
}

struct JointEntropyNull {
  std::vector<double> null_samples;
  double null_variance = 0.0;
  double empirical_variance = 0.0;
  double ratio = 1.0;  // null / empirical
  bool ratio_defined = true;
};

/// Each null draw takes H(C), H(D) and I(C,D) from independently chosen
/// corpora and combines them as H(C) + H(D) - I(C,D).
inline JointEntropyNull joint_entropy_null(const std::vector<CorpusMeans>& means, std::size_t n_samples, Rng& rng) {
  if (means.size() < 2) throw ParameterError("joint-entropy null needs at least two corpora");
  if (n_samples < 2) throw ParameterError("joint-entropy null needs at least two samples");
  JointEntropyNull out;
  out.null_samples.reserve(n_samples);
  const std::size_t n = means.size();
  for (std::size_t s = 0; s < n_samples; ++s) {
    const double hc = means[rng.below(n)].h_chroma;
    const double hd = means[rng.below(n)].h_duration;
    const double i = means[rng.below(n)].i_chroma_duration;
    out.null_samples.push_back(hc + hd - i);
  }
  std::vector<double> empirical;
  for (const auto& m : means) empirical.push_back(m.joint_entropy());
  out.null_variance = variance_of(out.null_samples);
  out.empirical_variance = variance_of(empirical);
  if (out.empirical_variance > 0.0) {
    out.ratio = out.null_variance / out.empirical_variance;
  } else {
    out.ratio = 1.0;
    out.ratio_defined = false;
  }
  return out;
}

struct ResampledCorrelation {
  double mean_r = 0.0;
  double ci_low = 0.0;   // 2.5th percentile
  double ci_high = 0.0;  // 97.5th percentile
  std::vector<double> samples;
};

/// pearson(H_chroma, H_duration) over subsamples keeping at most
/// `max_per_region` corpora per region.
inline ResampledCorrelation region_balanced_correlation(const std::vector<CorpusMeans>& means,
                                                        std::size_t max_per_region, std::size_t n_resamples,
                                                        Rng& rng) {
  if (max_per_region < 1) throw ParameterError("max_per_region must be at least 1");
  if (n_resamples < 1) throw ParameterError("n_resamples must be at least 1");
  std::map<std::string, std::vector<std::size_t>> regions;
  for (std::size_t i = 0; i < means.size(); ++i) regions[means[i].region].push_back(i);
  if (regions.size() < 2) throw ParameterError("region-balanced correlation needs at least two regions");
  ResampledCorrelation out;
  for (std::size_t s = 0; s < n_resamples; ++s) {
    std::vector<double> x, y;
    for (auto& [region, members] : regions) {
      std::vector<std::size_t> pick = members;
      if (pick.size() > max_per_region) {
        for (std::size_t k = 0; k < max_per_region; ++k) {
          std::swap(pick[k], pick[k + rng.below(pick.size() - k)]);
        }
        pick.resize(max_per_region);
        std::sort(pick.begin(), pick.end());
      }
      for (std::size_t i : pick) {
        x.push_back(means[i].h_chroma);
        y.push_back(means[i].h_duration);
      }
    }
    out.samples.push_back(pearson(x, y).r);
  }
  out.mean_r = mean_of(out.samples);
  out.ci_low = quantile(out.samples, 0.025);
  out.ci_high = quantile(out.samples, 0.975);
  return out;
}

// ---------------------------------------------------------------------------
// Pitch-rhythm deviation profile
// ---------------------------------------------------------------------------

enum class ProfilePitch { ChromaTransposed, MIntAbs };
enum class ProfileRhythm { IOI, Duration };

struct DeviationProfile {
  double corpus_mean = 0.0;
  std::map<int, double> deviation;  // pitch symbol -> mean rhythm - corpus mean
  std::map<int, std::size_t> count;
};

/// Mean rhythm value co-occurring with each pitch symbol, relative to the
/// corpus-wide mean. Chroma is transposed so the final note is 0 and pairs
/// with its own note's rhythm value; |MInt| pairs with the rhythm value of
/// the note the interval arrives at.
inline DeviationProfile rhythm_deviation_profile(const Corpus& corpus, ProfilePitch pitch_kind,
                                                 ProfileRhythm rhythm_kind) {
  std::vector<std::pair<int, double>> pairs;
  for (const Melody& m : corpus.melodies) {
    const std::vector<int> pitch = pitches_of(m);
    std::vector<double> rhythm;
    if (rhythm_kind == ProfileRhythm::Duration) {
      for (const auto& d : durations_of(m)) rhythm.push_back(to_double(d));
    } else {
      if (pitch.size() < 2) continue;
      for (const auto& d : iois_of(m)) rhythm.push_back(to_double(d));
    }
    if (pitch_kind == ProfilePitch::ChromaTransposed) {
      const int tonic = estimate_tonic(m, TonicMethod::Final);
      for (std::size_t i = 0; i < pitch.size() && i < rhythm.size(); ++i) {
        pairs.emplace_back(chroma_of(pitch[i] - tonic), rhythm[i]);
      }
    } else {
      for (std::size_t i = 1; i < pitch.size() && i < rhythm.size(); ++i) {
        pairs.emplace_back(std::abs(pitch[i] - pitch[i - 1]), rhythm[i]);
      }
    }
  }
  if (pairs.empty()) throw DegenerateInputError("no pitch-rhythm pairs in corpus \"" + corpus.meta.corpus_id + "\"");
  DeviationProfile out;
  std::map<int, double> sums;
  double total = 0.0;
  for (const auto& [sym, value] : pairs) {
    sums[sym] += value;
    ++out.count[sym];
    total += value;
  }
  out.corpus_mean = total / static_cast<double>(pairs.size());
  for (const auto& [sym, sum] : sums) {
    out.deviation[sym] = sum / static_cast<double>(out.count[sym]) - out.corpus_mean;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Melodic similarity
// ---------------------------------------------------------------------------

struct SimilarityReport {
  std::size_t n_matches = 0;
  std::size_t alphabet_size = 0;
  double p_pair = 0.0;        // A^(-2n): two random n-grams coincide
  double p_fixed_query = 0.0;  // A^(-n): a random n-gram equals the query
  double expected_pair = 0.0;
  double expected_fixed_query = 0.0;
  double enrichment = 0.0;  // n_matches / expected_pair
};

/// Counts corpus melodies that contain the first `n` symbols of `query` as a
/// contiguous run of the `kind` viewpoint, and the matches expected by
/// chance summed over every length-n window of the corpus.
inline SimilarityReport ngram_similarity(const ViewpointSequence& query, const Corpus& corpus, std::size_t n,
                                         ViewpointKind kind) {
  if (n < 2) throw ParameterError("n-gram similarity needs n >= 2");
  if (query.size() < n) throw ParameterError("query is shorter than n");
  const std::vector<Symbol> gram(query.symbols.begin(), query.symbols.begin() + static_cast<std::ptrdiff_t>(n));
  SimilarityReport r;
  r.alphabet_size = distribution_of(query).size();
  const double a = static_cast<double>(r.alphabet_size);
  r.p_pair = std::pow(a, -2.0 * static_cast<double>(n));
  r.p_fixed_query = std::pow(a, -static_cast<double>(n));
  for (const Melody& m : corpus.melodies) {
    ViewpointSequence seq;
    try {
      seq = extract_viewpoint(m, kind);
    } catch (const DegenerateInputError&) {
      continue;
    }
    if (seq.size() < n) continue;
    const double windows = static_cast<double>(seq.size() - n + 1);
    r.expected_pair += r.p_pair * windows;
    r.expected_fixed_query += r.p_fixed_query * windows;
    if (std::search(seq.symbols.begin(), seq.symbols.end(), gram.begin(), gram.end()) != seq.symbols.end()) {
      ++r.n_matches;
    }
  }
  r.enrichment = r.expected_pair > 0.0 ? static_cast<double>(r.n_matches) / r.expected_pair : 0.0;
  return r;
}

}  // namespace melic
