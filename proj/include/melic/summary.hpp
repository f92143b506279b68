#pragma once

// Per-corpus summary tables.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "melic/corpus.hpp"
#include "melic/error.hpp"
#include "melic/infotheory.hpp"
#include "melic/random.hpp"
#include "melic/repetition.hpp"
#include "melic/stats.hpp"
#include "melic/table.hpp"
#include "melic/viewpoints.hpp"

namespace melic {

struct SummaryRecord {
  std::string name;
  double h_chroma = 0.0;
  double h_dur = 0.0;
  double h_chroma_dur = 0.0;
  double length = 0.0;
  double length_no_repeat = 0.0;
  double total_info = 0.0;
  std::size_t n_melodies = 0;
  std::size_t n_skipped = 0;
};

struct SummaryReport {
  std::vector<SummaryRecord> records;
  std::size_t skipped = 0;
  std::vector<std::string> warnings;
};

inline const std::vector<std::string> kSummaryColumns{"name",   "H_chroma",         "H_dur",     "H_chroma_dur",
                                                      "length", "length_no_repeat", "total_info"};

/// Means over melodies of H(Chroma), H(Duration), H(Chroma, Duration), raw
/// length, L_NR of the joint sequence and total information. Melodies that
/// fail are skipped with a warning. Rows are ordered by corpus id.
inline SummaryReport run_summary(std::vector<const Corpus*> corpora, std::size_t l_min = 2) {
  std::sort(corpora.begin(), corpora.end(),
            [](const Corpus* a, const Corpus* b) { return a->meta.corpus_id < b->meta.corpus_id; });
  SummaryReport report;
  for (const Corpus* c : corpora) {
    SummaryRecord r;
    r.name = c->meta.corpus_id;
    for (const Melody& m : c->melodies) {
      try {
        validate_melody(m);
        const double hc = entropy(distribution_of(extract_viewpoint(m, ViewpointKind::Chroma)));
        const double hd = entropy(distribution_of(extract_viewpoint(m, ViewpointKind::Duration)));
        const TotalInformation t = total_information(m, l_min);
        r.h_chroma += hc;
        r.h_dur += hd;
        r.h_chroma_dur += t.joint_entropy;
        r.length += static_cast<double>(t.length);
        r.length_no_repeat += static_cast<double>(t.l_nr);
        r.total_info += t.total_bits;
        ++r.n_melodies;
      } catch (const Error& e) {
        ++r.n_skipped;
        report.warnings.push_back("corpus " + c->meta.corpus_id + ", melody " + m.id + ": " + e.what());
      }
    }
    if (r.n_melodies > 0) {
      const double n = static_cast<double>(r.n_melodies);
      r.h_chroma /= n;
      r.h_dur /= n;
      r.h_chroma_dur /= n;
      r.length /= n;
      r.length_no_repeat /= n;
      r.total_info /= n;
    } else {
      report.warnings.push_back("corpus " + c->meta.corpus_id + " has no usable melodies");
    }
    report.skipped += r.n_skipped;
    report.records.push_back(r);
  }
  return report;
}

inline SummaryReport run_summary(const std::vector<Corpus>& corpora, std::size_t l_min = 2) {
  std::vector<const Corpus*> ptrs;
  for (const auto& c : corpora) ptrs.push_back(&c);
  return run_summary(std::move(ptrs), l_min);
}

inline std::vector<Row> summary_rows(const SummaryReport& report) {
  std::vector<Row> rows;
  for (const auto& r : report.records) {
    rows.push_back({{"name", r.name},
                    {"H_chroma", r.h_chroma},
                    {"H_dur", r.h_dur},
                    {"H_chroma_dur", r.h_chroma_dur},
                    {"length", r.length},
                    {"length_no_repeat", r.length_no_repeat},
                    {"total_info", r.total_info}});
  }
  return rows;
}

/// Corpus means of H(Chroma), H(Duration), I(Chroma; Duration) and I*, the
/// input to the joint-entropy null and the region-balanced correlation.
/// Each melody's shuffles use a stream derived from the seed, the corpus id
/// and the melody id.
inline CorpusMeans corpus_means(const Corpus& corpus, std::size_t n_shuffles, std::uint64_t seed) {
  CorpusMeans out;
  out.corpus_id = corpus.meta.corpus_id;
  out.region = corpus.meta.region;
  out.type = std::string(to_string(corpus.meta.type));
  double star = 0.0;
  std::size_t n = 0;
  for (const Melody& m : corpus.melodies) {
    const auto chroma = extract_viewpoint(m, ViewpointKind::Chroma);
    const auto duration = extract_viewpoint(m, ViewpointKind::Duration);
    if (chroma.empty()) continue;
    Rng rng(derive_seed(derive_seed(seed, stable_hash(corpus.meta.corpus_id)), stable_hash(m.id)));
    const auto [c, d] = align(chroma, duration);
    const auto mi = mutual_information_excess(c, d, n_shuffles, rng);
    out.h_chroma += entropy(distribution_of(chroma));
    out.h_duration += entropy(distribution_of(duration));
    out.i_chroma_duration += mi.observed;
    star += mi.excess;
    ++n;
  }
  if (n == 0) throw DegenerateInputError("corpus " + corpus.meta.corpus_id + " has no pitched melodies");
  const double dn = static_cast<double>(n);
  out.h_chroma /= dn;
  out.h_duration /= dn;
  out.i_chroma_duration /= dn;
  if (n_shuffles > 0) out.i_star = star / dn;
  return out;
}

}  // namespace melic
