// melic: command-line front end for the melodic-corpus analyses.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "melic/melic.hpp"

namespace {

using namespace melic;

struct Globals {
  std::string viewpoint;
  std::size_t lmin = 2;
  std::size_t n_train = 10;
  std::size_t truncate = 50;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string format = "csv";
  std::string out;
};

Globals g;

void warn(const std::string& msg) { std::cerr << "warning: " << msg << "\n"; }

unsigned thread_count() { return g.threads ? std::max(1u, *g.threads) : threads_from_env(); }

std::uint64_t require_seed(const std::string& command) {
  if (!g.seed) throw ParameterError(command + " is randomized and requires --seed");
  return *g.seed;
}

ViewpointKind viewpoint_or(ViewpointKind fallback) {
  return g.viewpoint.empty() ? fallback : parse_viewpoint_kind(g.viewpoint);
}

void emit(const std::vector<Row>& rows, const std::vector<std::string>& columns) {
  const TableFormat format = g.format == "json" ? TableFormat::Json : TableFormat::Csv;
  const std::string text = write_table(rows, format, columns);
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + g.out);
  f << text;
}

std::vector<Corpus> load(const std::vector<std::string>& paths) {
  if (paths.empty()) throw ParameterError("no corpus paths given");
  std::vector<std::filesystem::path> p(paths.begin(), paths.end());
  auto corpora = load_corpora(p);
  if (corpora.empty()) throw ValidationError("no corpus files found");
  return corpora;
}

std::string join_symbols(const ViewpointSequence& seq) {
  std::string s;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i) s += ' ';
    s += to_string(seq.symbols[i]);
  }
  return s;
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(v[i]);
  }
  return s;
}

std::int64_t as_int(std::size_t v) { return static_cast<std::int64_t>(v); }

/// CSV with columns symbol,probability; symbols are integers.
Distribution<int> read_distribution_csv(const std::string& path) {
  const CsvTable t = read_csv(read_text_file(path));
  const std::size_t cs = t.column("symbol");
  const std::size_t cp = t.column("probability");
  std::vector<int> symbols;
  std::vector<double> probs;
  for (const auto& row : t.rows) {
    try {
      symbols.push_back(std::stoi(row[cs]));
      probs.push_back(std::stod(row[cp]));
    } catch (const std::exception&) {
      throw ValidationError(path + ": bad row \"" + row[cs] + "," + row[cp] + "\"");
    }
  }
  return make_distribution(std::move(symbols), std::move(probs));
}

std::vector<CorpusMeans> read_means(const std::string& path, const std::string& type_filter) {
  auto means = parse_means_csv(read_text_file(path));
  if (!type_filter.empty()) {
    std::erase_if(means, [&](const CorpusMeans& m) { return m.type != type_filter; });
  }
  return means;
}

template <typename Fn>
void for_each_melody(const std::vector<Corpus>& corpora, Fn&& fn) {
  for (const Corpus& c : corpora) {
    for (const Melody& m : c.melodies) {
      try {
        fn(c, m);
      } catch (const DegenerateInputError& e) {
        warn("corpus " + c.meta.corpus_id + ", melody " + m.id + " skipped: " + e.what());
      }
    }
  }
}

// ---------------------------------------------------------------------------

void cmd_viewpoints(const std::vector<std::string>& paths) {
  const ViewpointKind kind = viewpoint_or(ViewpointKind::Chroma);
  std::vector<Row> rows;
  for_each_melody(load(paths), [&](const Corpus& c, const Melody& m) {
    const auto seq = extract_viewpoint(m, kind);
    rows.push_back({{"corpus_id", c.meta.corpus_id},
                    {"id", m.id},
                    {"viewpoint", std::string(to_string(kind))},
                    {"length", as_int(seq.size())},
                    {"symbols", join_symbols(seq)}});
  });
  emit(rows, {"corpus_id", "id", "viewpoint", "length", "symbols"});
}

void cmd_entropy(const std::vector<std::string>& paths) {
  const ViewpointKind kind = viewpoint_or(ViewpointKind::Chroma);
  std::vector<Row> rows;
  for_each_melody(load(paths), [&](const Corpus& c, const Melody& m) {
    const auto seq = extract_viewpoint(m, kind);
    if (seq.empty()) throw DegenerateInputError("empty " + std::string(to_string(kind)) + " sequence");
    const InfoSummary s = summarize(seq);
    rows.push_back({{"corpus_id", c.meta.corpus_id},
                    {"id", m.id},
                    {"A", as_int(s.alphabet_size)},
                    {"H", s.entropy_bits},
                    {"G", s.gini}});
  });
  emit(rows, {"corpus_id", "id", "A", "H", "G"});
}

struct MiOptions {
  std::string with = "duration";
  std::size_t shuffles = 10;
};

void cmd_mi(const std::vector<std::string>& paths, const MiOptions& opt) {
  const std::uint64_t seed = require_seed("mi");
  const ViewpointKind kp = viewpoint_or(ViewpointKind::Chroma);
  const ViewpointKind kr = parse_viewpoint_kind(opt.with);
  std::vector<Row> rows;
  for_each_melody(load(paths), [&](const Corpus& c, const Melody& m) {
    auto [p, r] = align(extract_viewpoint(m, kp), extract_viewpoint(m, kr));
    if (p.empty()) throw DegenerateInputError("empty aligned sequences");
    Rng rng(derive_seed(derive_seed(seed, stable_hash(c.meta.corpus_id)), stable_hash(m.id)));
    const InfoSummary s = summarize(p);
    const MutualInformation mi = mutual_information_excess(p, r, opt.shuffles, rng);
    rows.push_back({{"corpus_id", c.meta.corpus_id},
                    {"id", m.id},
                    {"A", as_int(s.alphabet_size)},
                    {"H", s.entropy_bits},
                    {"G", s.gini},
                    {"I", mi.observed},
                    {"I_ran", mi.shuffled},
                    {"I_star", mi.excess}});
  });
  emit(rows, {"corpus_id", "id", "A", "H", "G", "I", "I_ran", "I_star"});
}

void cmd_repetition(const std::vector<std::string>& paths) {
  const ViewpointKind kind = viewpoint_or(ViewpointKind::Chroma);
  std::vector<Row> rows;
  for_each_melody(load(paths), [&](const Corpus& c, const Melody& m) {
    const auto seq = extract_viewpoint(m, kind);
    if (seq.empty()) throw DegenerateInputError("empty " + std::string(to_string(kind)) + " sequence");
    const auto r = remove_repetition(seq, g.lmin);
    rows.push_back({{"corpus_id", c.meta.corpus_id},
                    {"id", m.id},
                    {"L", as_int(seq.size())},
                    {"L_NR", as_int(r.l_nr)},
                    {"fraction", 1.0 - static_cast<double>(r.l_nr) / static_cast<double>(seq.size())}});
  });
  emit(rows, {"corpus_id", "id", "L", "L_NR", "fraction"});
}

void cmd_totalinfo(const std::vector<std::string>& paths) {
  std::vector<Row> rows;
  for_each_melody(load(paths), [&](const Corpus& c, const Melody& m) {
    const TotalInformation t = total_information(m, g.lmin);
    rows.push_back({{"corpus_id", c.meta.corpus_id},
                    {"id", m.id},
                    {"H_joint", t.joint_entropy},
                    {"L", as_int(t.length)},
                    {"L_NR", as_int(t.l_nr)},
                    {"T", t.total_bits}});
  });
  emit(rows, {"corpus_id", "id", "H_joint", "L", "L_NR", "T"});
}

struct PpmCliOptions {
  std::size_t max_order = 5;
  std::size_t shuffles = 10;
};

void cmd_ppm(const std::vector<std::string>& paths, const PpmCliOptions& p) {
  const std::uint64_t seed = require_seed("ppm-repetition");
  WithinCorpusOptions opt;
  opt.kind = viewpoint_or(ViewpointKind::MInt);
  opt.n_train = g.n_train;
  opt.truncate = g.truncate;
  opt.n_shuffle_reps = p.shuffles;
  opt.max_order = p.max_order;
  opt.threads = thread_count();
  auto corpora = load(paths);
  std::sort(corpora.begin(), corpora.end(),
            [](const Corpus& a, const Corpus& b) { return a.meta.corpus_id < b.meta.corpus_id; });
  std::vector<Row> rows;
  for (const Corpus& c : corpora) {
    const auto r = within_corpus_repetition(c, opt, derive_seed(seed, stable_hash(c.meta.corpus_id)));
    if (r.skipped) warn("corpus " + c.meta.corpus_id + ": " + std::to_string(r.skipped) + " melodies skipped");
    rows.push_back({{"corpus_id", c.meta.corpus_id},
                    {"n_targets", as_int(r.targets.size())},
                    {"skipped", as_int(r.skipped)},
                    {"mean_IC", r.mean_ic},
                    {"mean_IC_r", r.mean_ic_shuffled},
                    {"repetition_bits", r.repetition_bits}});
  }
  emit(rows, {"corpus_id", "n_targets", "skipped", "mean_IC", "mean_IC_r", "repetition_bits"});
}

struct ScaleCliOptions {
  std::string intervals;
  std::string lengths;
  std::size_t n = 100000;
  std::vector<double> o_values{0.5, 1.0, 1.5, 2.0};
  double semitones_per_o = 12.0;
  double threshold = 2.8;
  std::vector<std::string> empirical;
  double alpha = 0.999;
  double bin_width = 0.005;
  std::size_t min_samples = 30;
};

void cmd_scale(const ScaleCliOptions& s) {
  const std::uint64_t seed = require_seed("genmodel scale");
  ScaleSimOptions opt;
  opt.semitones_per_range = s.semitones_per_o;
  opt.threads = thread_count();
  opt.interval_source = s.intervals;
  opt.length_source = s.lengths;
  const auto sim = simulate_scale_entropy(read_distribution_csv(s.intervals), read_distribution_csv(s.lengths),
                                          s.o_values, s.n, seed, opt);
  std::optional<ScaleLikelihood> ll;
  std::map<int, std::size_t> empirical_alphabet;
  std::size_t n_empirical = 0;
  if (!s.empirical.empty()) {
    std::vector<double> h;
    for_each_melody(load(s.empirical), [&](const Corpus&, const Melody& m) {
      const auto chroma = extract_viewpoint(m, ViewpointKind::Chroma);
      if (chroma.empty()) throw DegenerateInputError("no pitched notes");
      const auto d = distribution_of(chroma);
      h.push_back(entropy(d));
      ++empirical_alphabet[static_cast<int>(d.size())];
      ++n_empirical;
    });
    ll = scale_loglikelihood(sim, h, s.alpha, s.bin_width, s.min_samples);
    for (int a : ll->unreliable) warn("A=" + std::to_string(a) + " has fewer than " +
                                      std::to_string(s.min_samples) + " samples; excluded from logL");
  }
  std::vector<Row> rows;
  for (const auto& [a, samples] : sim.per_alphabet) {
    Row row{{"A", std::int64_t{a}},
            {"n_samples", as_int(samples.size())},
            {"P_below", sim.fraction_below(a, s.threshold)}};
    Cell logl = std::monostate{};
    Cell freq = std::monostate{};
    if (ll) {
      if (const auto it = ll->log_likelihood.find(a); it != ll->log_likelihood.end()) logl = it->second;
      const auto it = empirical_alphabet.find(a);
      freq = static_cast<double>(it == empirical_alphabet.end() ? 0 : it->second) / static_cast<double>(n_empirical);
    }
    row.push_back({"logL", logl});
    row.push_back({"empirical_fraction", freq});
    rows.push_back(std::move(row));
  }
  emit(rows, {"A", "n_samples", "P_below", "logL", "empirical_fraction"});
}

struct FitCliOptions {
  std::string model = "all";
  std::size_t n_per_setting = 100;
  std::vector<int> grid_a;
  std::vector<int> grid_l;
  std::vector<double> grid_o;
  std::vector<double> grid_exponent;
  double semitones_per_o = 2.0;
  double entropy_bin = 0.25;
  bool points = false;
};

std::vector<std::string> split_models(const std::string& text, const std::vector<std::string>& all) {
  if (text == "all") return all;
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void cmd_fit_pitch(const std::vector<std::string>& paths, const FitCliOptions& f) {
  const std::uint64_t seed = require_seed("genmodel pitch");
  const PitchTargets targets = pitch_targets(load(paths));
  if (targets.empty()) throw DegenerateInputError("no melody has a defined pitch entropy ratio");
  PitchGrid grid;
  if (!f.grid_a.empty()) grid.alphabet = f.grid_a;
  if (!f.grid_l.empty()) grid.length = f.grid_l;
  if (!f.grid_o.empty()) grid.range = f.grid_o;
  if (!f.grid_exponent.empty()) grid.exponent = f.grid_exponent;
  FitOptions opt;
  opt.n_per_setting = f.n_per_setting;
  opt.threads = thread_count();
  std::vector<FitResult<PitchModelSpec>> fits;
  for (const auto& name : split_models(f.model, {kPitchModels.begin(), kPitchModels.end()})) {
    PitchModelSpec spec = parse_pitch_model(name);
    spec.semitones_per_range = f.semitones_per_o;
    fits.push_back(fit_pitch_model(spec, targets, grid, opt, seed));
  }
  std::vector<Row> rows;
  const std::vector<std::string> cols{"rank", "model", "A", "L", "O", "exponent", "score"};
  auto row_of = [](std::int64_t rank, const PitchModelSpec& s, double score) {
    return Row{{"rank", rank},      {"model", s.name()},   {"A", std::int64_t{s.alphabet}},
               {"L", std::int64_t{s.length}}, {"O", s.range}, {"exponent", s.exponent},
               {"score", score}};
  };
  if (f.points) {
    for (const auto& fit : fits) {
      for (const auto& [s, score] : fit.evaluated) rows.push_back(row_of(0, s, score));
    }
  } else {
    std::stable_sort(fits.begin(), fits.end(), [](const auto& a, const auto& b) { return a.score < b.score; });
    for (std::size_t i = 0; i < fits.size(); ++i) rows.push_back(row_of(as_int(i + 1), fits[i].best, fits[i].score));
  }
  emit(rows, cols);
}

void cmd_fit_rhythm(const std::vector<std::string>& paths, const FitCliOptions& f) {
  const std::uint64_t seed = require_seed("genmodel rhythm");
  const RhythmTargets targets = rhythm_targets(load(paths));
  if (targets.empty()) throw DegenerateInputError("no melody has a defined rhythm entropy ratio");
  RhythmGrid grid;
  if (!f.grid_a.empty()) grid.alphabet = f.grid_a;
  if (!f.grid_l.empty()) grid.length = f.grid_l;
  if (!f.grid_exponent.empty()) grid.exponent = f.grid_exponent;
  FitOptions opt;
  opt.n_per_setting = f.n_per_setting;
  opt.threads = thread_count();
  opt.entropy_bin_width = f.entropy_bin;
  std::vector<FitResult<RhythmModelSpec>> fits;
  for (const auto& name : split_models(f.model, rhythm_model_names())) {
    fits.push_back(fit_rhythm_model(parse_rhythm_model(name), targets, grid, opt, seed));
  }
  std::vector<Row> rows;
  auto row_of = [](std::int64_t rank, const RhythmModelSpec& s, double score) {
    return Row{{"rank", rank}, {"model", s.name()}, {"L", std::int64_t{s.length}},
               {"exponent", s.exponent}, {"score", score}};
  };
  if (f.points) {
    for (const auto& fit : fits) {
      for (const auto& [s, score] : fit.evaluated) rows.push_back(row_of(0, s, score));
    }
  } else {
    std::stable_sort(fits.begin(), fits.end(), [](const auto& a, const auto& b) { return a.score < b.score; });
    for (std::size_t i = 0; i < fits.size(); ++i) rows.push_back(row_of(as_int(i + 1), fits[i].best, fits[i].score));
  }
  emit(rows, {"rank", "model", "L", "exponent", "score"});
}

struct SimilarityCliOptions {
  std::string query;
  std::size_t n = 10;
};

void cmd_similarity(const std::vector<std::string>& paths, const SimilarityCliOptions& s) {
  const ViewpointKind kind = viewpoint_or(ViewpointKind::MInt);
  const Melody q = parse_melody(read_text_file(s.query));
  const ViewpointSequence query = extract_viewpoint(q, kind);
  std::vector<Row> rows;
  for (const Corpus& c : load(paths)) {
    const SimilarityReport r = ngram_similarity(query, c, s.n, kind);
    rows.push_back({{"corpus_id", c.meta.corpus_id},
                    {"n_matches", as_int(r.n_matches)},
                    {"A", as_int(r.alphabet_size)},
                    {"p_pair", r.p_pair},
                    {"p_fixed_query", r.p_fixed_query},
                    {"expected_pair", r.expected_pair},
                    {"expected_fixed_query", r.expected_fixed_query},
                    {"enrichment", r.enrichment}});
  }
  emit(rows, {"corpus_id", "n_matches", "A", "p_pair", "p_fixed_query", "expected_pair", "expected_fixed_query",
              "enrichment"});
}

struct MeansCliOptions {
  std::string type;
  std::size_t samples = 10000;
  std::size_t max_per_region = 5;
  std::size_t resamples = 1000;
};

void cmd_null_joint(const std::string& path, const MeansCliOptions& o) {
  Rng rng(require_seed("null-joint"));
  const auto means = read_means(path, o.type);
  const JointEntropyNull r = joint_entropy_null(means, o.samples, rng);
  emit({{{"n_corpora", as_int(means.size())},
         {"n_samples", as_int(o.samples)},
         {"null_variance", r.null_variance},
         {"empirical_variance", r.empirical_variance},
         {"ratio", r.ratio},
         {"ratio_defined", r.ratio_defined}}},
       {});
}

void cmd_subsample_corr(const std::string& path, const MeansCliOptions& o) {
  Rng rng(require_seed("subsample-corr"));
  const auto means = read_means(path, o.type);
  std::vector<double> x, y;
  for (const auto& m : means) {
    x.push_back(m.h_chroma);
    y.push_back(m.h_duration);
  }
  const Correlation all = pearson(x, y);
  const ResampledCorrelation r = region_balanced_correlation(means, o.max_per_region, o.resamples, rng);
  emit({{{"n_corpora", as_int(means.size())},
         {"r_all", all.r},
         {"p_all", all.p_two_sided},
         {"mean_r", r.mean_r},
         {"ci_low", r.ci_low},
         {"ci_high", r.ci_high},
         {"n_resamples", as_int(o.resamples)}}},
       {});
}

void cmd_summary(const std::vector<std::string>& paths) {
  const SummaryReport report = run_summary(load(paths), g.lmin);
  for (const auto& w : report.warnings) warn(w);
  if (report.skipped) warn(std::to_string(report.skipped) + " melodies skipped");
  emit(summary_rows(report), kSummaryColumns);
}

void cmd_means(const std::vector<std::string>& paths, std::size_t shuffles) {
  const std::uint64_t seed = require_seed("means");
  auto corpora = load(paths);
  std::sort(corpora.begin(), corpora.end(),
            [](const Corpus& a, const Corpus& b) { return a.meta.corpus_id < b.meta.corpus_id; });
  std::vector<CorpusMeans> means;
  for (const Corpus& c : corpora) means.push_back(corpus_means(c, shuffles, seed));
  emit(means_rows(means), {"corpus_id", "region", "type", "H_chroma", "H_duration", "I_chroma_duration", "I_star"});
}

struct KernCliOptions {
  std::string corpus_id = "kern";
  std::string type = "Folk";
  std::string region;
};

void cmd_import_kern(const std::vector<std::string>& files, const KernCliOptions& k) {
  Corpus c;
  c.meta.corpus_id = k.corpus_id;
  c.meta.type = parse_corpus_type(k.type);
  c.meta.region = k.region;
  for (const auto& f : files) {
    c.melodies.push_back(parse_kern_subset(read_text_file(f), std::filesystem::path(f).stem().string()));
  }
  validate_corpus(c);
  const std::string text = serialize_canonical(c);
  if (g.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream(g.out, std::ios::binary) << text;
  }
}

void cmd_tonic(const std::vector<std::string>& paths, const std::string& method) {
  const TonicMethod m = parse_tonic_method(method);
  std::vector<Row> rows;
  for_each_melody(load(paths), [&](const Corpus& c, const Melody& mel) {
    rows.push_back({{"corpus_id", c.meta.corpus_id}, {"id", mel.id}, {"tonic", std::int64_t{estimate_tonic(mel, m)}}});
  });
  emit(rows, {"corpus_id", "id", "tonic"});
}

void cmd_octaves(const std::vector<std::string>& paths) {
  std::vector<Row> rows;
  for_each_melody(load(paths), [&](const Corpus& c, const Melody& m) {
    const auto chroma = extract_viewpoint(m, ViewpointKind::Chroma);
    if (chroma.size() < 2) throw DegenerateInputError("fewer than two notes");
    const auto r = recover_octaves(chroma, extract_viewpoint(m, ViewpointKind::MInt));
    rows.push_back({{"corpus_id", c.meta.corpus_id},
                    {"id", m.id},
                    {"length", as_int(chroma.size())},
                    {"accuracy", *r.accuracy},
                    {"predicted_mint", join_ints(r.predicted)}});
  });
  emit(rows, {"corpus_id", "id", "length", "accuracy", "predicted_mint"});
}

struct DeviationCliOptions {
  std::string pitch = "chroma";
  std::string rhythm = "ioi";
};

void cmd_deviation(const std::vector<std::string>& paths, const DeviationCliOptions& d) {
  ProfilePitch pk;
  if (d.pitch == "chroma") {
    pk = ProfilePitch::ChromaTransposed;
  } else if (d.pitch == "mint-abs") {
    pk = ProfilePitch::MIntAbs;
  } else {
    throw ParameterError("--pitch must be chroma or mint-abs");
  }
  ProfileRhythm rk;
  if (d.rhythm == "ioi") {
    rk = ProfileRhythm::IOI;
  } else if (d.rhythm == "duration") {
    rk = ProfileRhythm::Duration;
  } else {
    throw ParameterError("--rhythm must be ioi or duration");
  }
  std::vector<Row> rows;
  for (const Corpus& c : load(paths)) {
    const DeviationProfile p = rhythm_deviation_profile(c, pk, rk);
    for (const auto& [sym, dev] : p.deviation) {
      rows.push_back({{"corpus_id", c.meta.corpus_id},
                      {"symbol", std::int64_t{sym}},
                      {"count", as_int(p.count.at(sym))},
                      {"deviation", dev},
                      {"corpus_mean", p.corpus_mean}});
    }
  }
  emit(rows, {"corpus_id", "symbol", "count", "deviation", "corpus_mean"});
}

void cmd_bounds(std::size_t length) {
  std::vector<Row> rows;
  for (const auto& b : entropy_ratio_bounds(length)) {
    auto opt = [](const std::optional<double>& v) { return v ? Cell{*v} : Cell{std::monostate{}}; };
    rows.push_back({{"family", b.family},
                    {"length", as_int(b.length)},
                    {"H_pitch", b.h_pitch},
                    {"H_chroma", b.h_chroma},
                    {"H_mint", b.h_mint},
                    {"pitch_ratio", opt(b.pitch_ratio)},
                    {"chroma_ratio", opt(b.chroma_ratio)}});
  }
  emit(rows, {"family", "length", "H_pitch", "H_chroma", "H_mint", "pitch_ratio", "chroma_ratio"});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Information-theoretic analysis of melodic corpora"};
  app.fallthrough();
  app.require_subcommand(1);

  app.add_option("--viewpoint,--kind", g.viewpoint, "Viewpoint (pitch, chroma, sdeg, mint, sint, contour, duration, "
                                                    "ioi, ioi-ratio, duration-ratio, chroma-duration, mint-duration)");
  app.add_option("--lmin", g.lmin, "Minimum repeated-substring length")->check(CLI::Range(2, 1 << 20));
  app.add_option("--n-train", g.n_train, "Training melodies per PPM target");
  app.add_option("--truncate", g.truncate, "Truncate sequences to this many symbols");
  app.add_option("--seed", g.seed, "Random seed (required for randomized commands)");
  app.add_option("--threads", g.threads, "Worker threads (default: MELIC_THREADS or 1)");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", g.out, "Write output to PATH instead of stdout");

  std::function<void()> run;
  std::vector<std::string> paths;
  auto corpus_command = [&](const char* name, const char* help, void (*fn)(const std::vector<std::string>&)) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("corpus", paths, "Corpus files or directories")->required();
    sub->callback([&run, &paths, fn] { run = [&paths, fn] { fn(paths); }; });
    return sub;
  };

  corpus_command("viewpoints", "Per-melody viewpoint sequences", cmd_viewpoints);
  corpus_command("entropy", "Per-melody alphabet size, entropy and Gini", cmd_entropy);
  corpus_command("gini", "Per-melody alphabet size, entropy and Gini", cmd_entropy);
  corpus_command("repetition", "Per-melody length after repetition removal", cmd_repetition);
  corpus_command("totalinfo", "Per-melody total information", cmd_totalinfo);
  corpus_command("summary", "Per-corpus mean information properties", cmd_summary);
  corpus_command("octaves", "Octave recovery from chroma", cmd_octaves);

  MiOptions mi;
  auto* mi_cmd = app.add_subcommand("mi", "Per-melody mutual information with shuffle null");
  mi_cmd->add_option("corpus", paths)->required();
  mi_cmd->add_option("--with", mi.with, "Second viewpoint");
  mi_cmd->add_option("--shuffles", mi.shuffles, "Shuffles for the null");
  mi_cmd->callback([&] { run = [&] { cmd_mi(paths, mi); }; });

  PpmCliOptions ppm;
  auto* ppm_cmd = app.add_subcommand("ppm-repetition", "Within-corpus repetition from PPM information content");
  ppm_cmd->add_option("corpus", paths)->required();
  ppm_cmd->add_option("--max-order", ppm.max_order, "Maximum PPM context length");
  ppm_cmd->add_option("--shuffles", ppm.shuffles, "Shuffled training sets per target");
  ppm_cmd->callback([&] { run = [&] { cmd_ppm(paths, ppm); }; });

  auto* gen = app.add_subcommand("genmodel", "Generative sequence models");
  gen->require_subcommand(1);
  ScaleCliOptions scale;
  auto* scale_cmd = gen->add_subcommand("scale", "Simulated chroma entropy per scale size");
  scale_cmd->add_option("--intervals", scale.intervals, "Interval distribution CSV (symbol,probability)")->required();
  scale_cmd->add_option("--lengths", scale.lengths, "Length distribution CSV (symbol,probability)")->required();
  scale_cmd->add_option("--n", scale.n, "Number of sequences");
  scale_cmd->add_option("--o-values", scale.o_values, "Range values O, cycled over sequences")->delimiter(',')->allow_extra_args(false);
  scale_cmd->add_option("--semitones-per-o", scale.semitones_per_o, "Window width in semitones per unit O");
  scale_cmd->add_option("--threshold", scale.threshold, "Entropy threshold for P_below");
  scale_cmd->add_option("--empirical", scale.empirical, "Corpora supplying the empirical entropy density");
  scale_cmd->add_option("--alpha", scale.alpha, "Weight of the empirical density");
  scale_cmd->add_option("--bin-width", scale.bin_width, "Entropy grid bin width");
  scale_cmd->add_option("--min-samples", scale.min_samples, "Minimum samples per scale size");
  scale_cmd->callback([&] { run = [&] { cmd_scale(scale); }; });

  FitCliOptions fit;
  for (const char* which : {"pitch", "rhythm"}) {
    const bool is_pitch = std::string(which) == "pitch";
    auto* cmd = gen->add_subcommand(which, is_pitch ? "Fit pitch models" : "Fit rhythm models");
    cmd->add_option("corpus", paths)->required();
    cmd->add_option("--model", fit.model, "Model name, comma list, or all");
    cmd->add_option("--n-per-setting", fit.n_per_setting, "Sequences per grid point");
    cmd->add_option("--grid-A", fit.grid_a, "Alphabet sizes")->delimiter(',')->allow_extra_args(false);
    cmd->add_option("--grid-L", fit.grid_l, "Sequence lengths")->delimiter(',')->allow_extra_args(false);
    cmd->add_option("--grid-exponent", fit.grid_exponent, "Power-law exponents")->delimiter(',')->allow_extra_args(false);
    cmd->add_flag("--points", fit.points, "Emit every grid point");
    if (is_pitch) {
      cmd->add_option("--grid-O", fit.grid_o, "Range values")->delimiter(',')->allow_extra_args(false);
      cmd->add_option("--semitones-per-o", fit.semitones_per_o, "Half-range in semitones per unit O");
      cmd->callback([&] { run = [&] { cmd_fit_pitch(paths, fit); }; });
    } else {
      cmd->add_option("--entropy-bin", fit.entropy_bin, "H(IOI) bin width");
      cmd->callback([&] { run = [&] { cmd_fit_rhythm(paths, fit); }; });
    }
  }

  SimilarityCliOptions sim;
  auto* sim_cmd = app.add_subcommand("similarity", "Query n-gram matches against corpora");
  sim_cmd->add_option("corpus", paths)->required();
  sim_cmd->add_option("--query", sim.query, "Melody JSON file")->required();
  sim_cmd->add_option("--n", sim.n, "n-gram length");
  sim_cmd->callback([&] { run = [&] { cmd_similarity(paths, sim); }; });

  MeansCliOptions mo;
  std::string means_path;
  auto* null_cmd = app.add_subcommand("null-joint", "Joint-entropy null from corpus means");
  null_cmd->add_option("means", means_path, "Means CSV")->required();
  null_cmd->add_option("--samples", mo.samples, "Null draws");
  null_cmd->add_option("--type", mo.type, "Keep only corpora of this type");
  null_cmd->callback([&] { run = [&] { cmd_null_joint(means_path, mo); }; });

  auto* corr_cmd = app.add_subcommand("subsample-corr", "Region-balanced entropy correlation");
  corr_cmd->add_option("means", means_path, "Means CSV")->required();
  corr_cmd->add_option("--max-per-region", mo.max_per_region, "Corpora kept per region");
  corr_cmd->add_option("--resamples", mo.resamples, "Number of resamples");
  corr_cmd->add_option("--type", mo.type, "Keep only corpora of this type");
  corr_cmd->callback([&] { run = [&] { cmd_subsample_corr(means_path, mo); }; });

  std::size_t means_shuffles = 10;
  auto* means_cmd = app.add_subcommand("means", "Per-corpus entropy and mutual-information means");
  means_cmd->add_option("corpus", paths)->required();
  means_cmd->add_option("--shuffles", means_shuffles, "Shuffles for I*");
  means_cmd->callback([&] { run = [&] { cmd_means(paths, means_shuffles); }; });

  KernCliOptions kern;
  auto* kern_cmd = app.add_subcommand("import-kern", "Convert single-spine kern files to a canonical corpus");
  kern_cmd->add_option("files", paths, "Kern files")->required();
  kern_cmd->add_option("--corpus-id", kern.corpus_id);
  kern_cmd->add_option("--type", kern.type);
  kern_cmd->add_option("--region", kern.region);
  kern_cmd->callback([&] { run = [&] { cmd_import_kern(paths, kern); }; });

  std::string tonic_method = "final";
  auto* tonic_cmd = app.add_subcommand("tonic", "Per-melody tonic estimate");
  tonic_cmd->add_option("corpus", paths)->required();
  tonic_cmd->add_option("--method", tonic_method, "final, first or modal");
  tonic_cmd->callback([&] { run = [&] { cmd_tonic(paths, tonic_method); }; });

  DeviationCliOptions dev;
  auto* dev_cmd = app.add_subcommand("deviation", "Mean rhythm deviation per pitch symbol");
  dev_cmd->add_option("corpus", paths)->required();
  dev_cmd->add_option("--pitch", dev.pitch, "chroma or mint-abs");
  dev_cmd->add_option("--rhythm", dev.rhythm, "ioi or duration");
  dev_cmd->callback([&] { run = [&] { cmd_deviation(paths, dev); }; });

  std::size_t bound_length = 30;
  auto* bounds_cmd = app.add_subcommand("bounds", "Entropy-ratio bound families");
  bounds_cmd->add_option("--length", bound_length, "Sequence length")->check(CLI::Range(3, 1 << 20));
  bounds_cmd->callback([&] { run = [&] { cmd_bounds(bound_length); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    if (run) run();
  } catch (const melic::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
