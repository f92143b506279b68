#pragma once

// Variable-order Markov prediction by partial matching (escape method C)
// and the within-corpus repetition measure built on it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "melic/corpus.hpp"
#include "melic/error.hpp"
#include "melic/parallel.hpp"
#include "melic/random.hpp"
#include "melic/viewpoints.hpp"

namespace melic {

/// Context-count tables up to `max_order` over a declared alphabet.
template <typename T>
class PpmModel {
 public:
  using Context = std::vector<int>;
  using CountTable = std::map<int, std::size_t>;

  PpmModel(std::size_t max_order, std::set<T> alphabet)
      : max_order_(max_order), alphabet_(alphabet.begin(), alphabet.end()) {
    if (alphabet_.empty()) throw ParameterError("PPM alphabet must not be empty");
  }

  std::size_t max_order() const noexcept { return max_order_; }
  std::size_t alphabet_size() const noexcept { return alphabet_.size(); }
  const std::vector<T>& alphabet() const noexcept { return alphabet_; }

  /// Count table following `context` (symbols), or nullptr if never seen.
  const CountTable* counts(std::span<const T> context) const {
    const auto it = tables_.find(encode(context));
    return it == tables_.end() ? nullptr : &it->second;
  }

  int code(const T& symbol) const {
    const auto it = std::lower_bound(alphabet_.begin(), alphabet_.end(), symbol);
    if (it == alphabet_.end() || symbol < *it) {
      throw ValidationError("symbol " + describe(symbol) + " is outside the declared PPM alphabet");
    }
    return static_cast<int>(it - alphabet_.begin());
  }

  /// Counts every n-gram up to max_order inside `seq`.
  void train(std::span<const T> seq) {
    const Context codes = encode(seq);
    for (std::size_t i = 0; i < codes.size(); ++i) {
      const std::size_t top = std::min(max_order_, i);
      for (std::size_t k = 0; k <= top; ++k) {
        Context ctx(codes.begin() + static_cast<std::ptrdiff_t>(i - k),
                    codes.begin() + static_cast<std::ptrdiff_t>(i));
        ++tables_[std::move(ctx)][codes[i]];
      }
    }
  }

  /// Full predictive distribution over the alphabet (alphabet order) after
  /// `history`. Built upward from a uniform floor: at each order whose
  /// context was seen, a seen symbol gets c/(n+e) and the escape mass
  /// e/(n+e) is shared among unseen symbols in proportion to the order
  /// below. With every symbol seen the escape is not needed and seen
  /// symbols get c/n.
  std::vector<double> predict(std::span<const T> history) const {
    const Context codes = encode(history);
    return predict_codes(codes, codes.size());
  }

  /// Probability of each symbol of `seq` given its preceding symbols.
  std::vector<double> sequence_probabilities(std::span<const T> seq) const {
    const Context codes = encode(seq);
    std::vector<double> out;
    out.reserve(codes.size());
    for (std::size_t i = 0; i < codes.size(); ++i) {
      out.push_back(predict_codes(codes, i)[static_cast<std::size_t>(codes[i])]);
    }
    return out;
  }

 private:
  static std::string describe(const T& symbol) {
    if constexpr (std::is_same_v<T, Symbol>) {
      return to_string(symbol);
    } else if constexpr (std::is_arithmetic_v<T>) {
      return std::to_string(symbol);
    } else {
      return "<symbol>";
    }
  }

  Context encode(std::span<const T> seq) const {
    Context out;
    out.reserve(seq.size());
    for (const T& s : seq) out.push_back(code(s));
    return out;
  }

  std::vector<double> predict_codes(const Context& codes, std::size_t position) const {
    const std::size_t a = alphabet_.size();
    std::vector<double> dist(a, 1.0 / static_cast<double>(a));
    const std::size_t top = std::min(max_order_, position);
    for (std::size_t k = 0; k <= top; ++k) {
      const Context ctx(codes.begin() + static_cast<std::ptrdiff_t>(position - k),
                        codes.begin() + static_cast<std::ptrdiff_t>(position));
      const auto it = tables_.find(ctx);
      if (it == tables_.end()) break;  // longer contexts cannot have been seen either
      const CountTable& table = it->second;
      std::size_t n = 0;
      for (const auto& [sym, c] : table) n += c;
      const double e = static_cast<double>(table.size());
      std::vector<double> next(a, 0.0);
      if (table.size() == a) {
        for (const auto& [sym, c] : table) next[static_cast<std::size_t>(sym)] = static_cast<double>(c) / n;
      } else {
        const double denom = static_cast<double>(n) + e;
        const double escape = e / denom;
        std::vector<bool> seen(a, false);
        for (const auto& [sym, c] : table) {
          next[static_cast<std::size_t>(sym)] = static_cast<double>(c) / denom;
          seen[static_cast<std::size_t>(sym)] = true;
        }
        double unseen_mass = 0.0;
        for (std::size_t s = 0; s < a; ++s) {
          if (!seen[s]) unseen_mass += dist[s];
        }
        for (std::size_t s = 0; s < a; ++s) {
          if (!seen[s]) next[s] = escape * dist[s] / unseen_mass;
        }
      }
      dist = std::move(next);
    }
    return dist;
  }

  std::size_t max_order_;
  std::vector<T> alphabet_;
  std::map<Context, CountTable> tables_;
};

template <typename T>
PpmModel<T> train_ppm(const std::vector<std::vector<T>>& sequences, std::size_t max_order,
                      const std::set<T>& alphabet) {
  PpmModel<T> model(max_order, alphabet);
  for (const auto& s : sequences) model.train(s);
  return model;
}

struct ICResult {
  std::vector<double> per_symbol_bits;
  double mean_bits = 0.0;
};

/// Information content -log2 P(x_i | context) per position.
template <typename T>
ICResult information_content(const PpmModel<T>& model, std::span<const T> seq) {
  ICResult r;
  for (double p : model.sequence_probabilities(seq)) r.per_symbol_bits.push_back(-std::log2(p));
  if (!r.per_symbol_bits.empty()) {
    double total = 0.0;
    for (double b : r.per_symbol_bits) total += b;
    r.mean_bits = total / static_cast<double>(r.per_symbol_bits.size());
  }
  return r;
}

// ---------------------------------------------------------------------------
// Within-corpus repetition
// ---------------------------------------------------------------------------

struct WithinCorpusOptions {
  ViewpointKind kind = ViewpointKind::MInt;
  std::size_t n_train = 10;
  std::size_t truncate = 50;
  std::size_t n_shuffle_reps = 10;
  std::size_t max_order = 5;
  unsigned threads = 1;
};

struct TargetRepetition {
  std::string melody_id;
  double ic = 0.0;
  double ic_shuffled = 0.0;
};

struct WithinCorpusRepetition {
  double mean_ic = 0.0;
  double mean_ic_shuffled = 0.0;  // IC_r
  double repetition_bits = 0.0;   // IC_r - IC
  std::vector<TargetRepetition> targets;
  std::size_t skipped = 0;  // melodies whose viewpoint sequence was empty or undefined
};

/// Within-corpus repetition over pre-extracted sequences keyed by melody id.
inline WithinCorpusRepetition within_corpus_repetition_sequences(const std::vector<std::string>& ids,
                                                                  std::vector<std::vector<Symbol>> sequences,
                                                                  const WithinCorpusOptions& opt,
                                                                  std::uint64_t seed,
                                                                  const std::string& corpus_name = "corpus") {
  if (ids.size() != sequences.size()) throw ParameterError("ids and sequences differ in length");
  if (sequences.size() < opt.n_train + 1) {
    throw ParameterError("corpus \"" + corpus_name + "\" has " + std::to_string(sequences.size()) +
                         " usable melodies; within-corpus repetition needs at least " +
                         std::to_string(opt.n_train + 1));
  }
  std::set<Symbol> alphabet;
  for (auto& s : sequences) {
    if (s.size() > opt.truncate) s.resize(opt.truncate);
    alphabet.insert(s.begin(), s.end());
  }
  // Candidate pools are ordered by melody id so the draw does not depend on
  // the order melodies appear in the corpus.
  std::vector<std::size_t> by_id(ids.size());
  for (std::size_t i = 0; i < by_id.size(); ++i) by_id[i] = i;
  std::sort(by_id.begin(), by_id.end(), [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });

  WithinCorpusRepetition out;
  out.targets.resize(ids.size());
  parallel_for(ids.size(), opt.threads, [&](std::size_t t) {
    Rng rng(derive_seed(seed, stable_hash(ids[t])));
    std::vector<std::size_t> pool;
    for (std::size_t i : by_id) {
      if (i != t) pool.push_back(i);
    }
    // Partial Fisher-Yates: the first n_train entries become the sample.
    for (std::size_t k = 0; k < opt.n_train; ++k) {
      const std::size_t j = k + rng.below(pool.size() - k);
      std::swap(pool[k], pool[j]);
    }
    std::vector<std::vector<Symbol>> training;
    for (std::size_t k = 0; k < opt.n_train; ++k) training.push_back(sequences[pool[k]]);

    const auto model = train_ppm(training, opt.max_order, alphabet);
    const double ic = information_content<Symbol>(model, sequences[t]).mean_bits;
    double ic_r = 0.0;
    for (std::size_t rep = 0; rep < opt.n_shuffle_reps; ++rep) {
      auto shuffled = training;
      for (auto& s : shuffled) rng.shuffle(std::span<Symbol>(s));
      const auto null_model = train_ppm(shuffled, opt.max_order, alphabet);
      ic_r += information_content<Symbol>(null_model, sequences[t]).mean_bits;
    }
    if (opt.n_shuffle_reps > 0) ic_r /= static_cast<double>(opt.n_shuffle_reps);
    out.targets[t] = {ids[t], ic, ic_r};
  });
  for (const auto& t : out.targets) {
    out.mean_ic += t.ic;
    out.mean_ic_shuffled += t.ic_shuffled;
  }
  out.mean_ic /= static_cast<double>(out.targets.size());
  out.mean_ic_shuffled /= static_cast<double>(out.targets.size());
  out.repetition_bits = out.mean_ic_shuffled - out.mean_ic;
  return out;
}

/// IC from a model trained on `n_train` other melodies of the corpus versus
/// IC_r from the same melodies with their symbols shuffled. Each target's
/// random stream is derived from the seed and the target's id.
inline WithinCorpusRepetition within_corpus_repetition(const Corpus& corpus, const WithinCorpusOptions& opt,
                                                       std::uint64_t seed) {
  std::vector<std::string> ids;
  std::vector<std::vector<Symbol>> sequences;
  std::size_t skipped = 0;
  for (const Melody& m : corpus.melodies) {
    try {
      auto seq = extract_viewpoint(m, opt.kind);
      if (seq.empty()) {
        ++skipped;
        continue;
      }
      ids.push_back(m.id);
      sequences.push_back(std::move(seq.symbols));
    } catch (const DegenerateInputError&) {
      ++skipped;
    }
  }
  auto out = within_corpus_repetition_sequences(ids, std::move(sequences), opt, seed, corpus.meta.corpus_id);
  out.skipped = skipped;
  return out;
}

}  // namespace melic
