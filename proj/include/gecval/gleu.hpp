#ifndef GECVAL_GLEU_HPP
#define GECVAL_GLEU_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "gecval/core.hpp"
#include "gecval/error.hpp"
#include "gecval/rng.hpp"

namespace gecval {

inline constexpr std::uint64_t kDefaultGleuSeed = 12345;

struct GleuParams {
  int order = 4;
  int iterations = 500;
  std::uint64_t seed = kDefaultGleuSeed;
  bool smoothing = false;  // add-one on orders >= 2, for tiny corpora
};

// Per-order p_n numerators/denominators plus the lengths feeding the brevity
// penalty. Numerators may go negative before corpus-level flooring: the
// uncorrected-source penalty is subtracted per sentence.
struct NgramStats {
  std::vector<long long> numerator;
  std::vector<long long> denominator;
  long long hyp_len = 0;
  long long ref_len = 0;

  explicit NgramStats(int order) : numerator(order, 0), denominator(order, 0) {}

  NgramStats& operator+=(const NgramStats& o) {
    for (std::size_t n = 0; n < numerator.size(); ++n) {
      numerator[n] += o.numerator[n];
      denominator[n] += o.denominator[n];
    }
    hyp_len += o.hyp_len;
    ref_len += o.ref_len;
    return *this;
  }
};

namespace detail {

// n-gram multiset per order, keyed by tokens joined on an unlikely byte.
struct NgramCounts {
  std::vector<std::unordered_map<std::string, int>> per_order;
};

inline NgramCounts count_ngrams(const Sentence& tokens, int order) {
  NgramCounts counts;
  counts.per_order.resize(order);
  for (int n = 1; n <= order; ++n) {
    auto& bucket = counts.per_order[n - 1];
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      std::string key = tokens[i];
      for (int k = 1; k < n; ++k) {
        key += '\x1f';
        key += tokens[i + k];
      }
      ++bucket[key];
    }
  }
  return counts;
}

inline int count_of(const std::unordered_map<std::string, int>& bucket,
                    const std::string& key) {
  const auto it = bucket.find(key);
  return it == bucket.end() ? 0 : it->second;
}

inline NgramStats stats_from_counts(const NgramCounts& hyp, const NgramCounts& src,
                                    const NgramCounts& ref, long long hyp_len,
                                    long long ref_len, int order) {
  NgramStats stats(order);
  stats.hyp_len = hyp_len;
  stats.ref_len = ref_len;
  for (int n = 0; n < order; ++n) {
    for (const auto& [gram, h] : hyp.per_order[n]) {
      const int r = count_of(ref.per_order[n], gram);
      const int s = count_of(src.per_order[n], gram);
      const int matched = std::min(h, r);
      const int penalty = std::max(0, std::min(h, s) - matched);
      stats.numerator[n] += matched - penalty;
      stats.denominator[n] += h;
    }
  }
  return stats;
}

}  // namespace detail

inline NgramStats sentence_gleu_stats(const Sentence& source, const Sentence& hypothesis,
                                      const Sentence& reference, int order = 4) {
  return detail::stats_from_counts(
      detail::count_ngrams(hypothesis, order), detail::count_ngrams(source, order),
      detail::count_ngrams(reference, order),
      static_cast<long long>(hypothesis.size()),
      static_cast<long long>(reference.size()), order);
}

// Corpus score from summed stats: p_n = max(0, num) / max(1, den), uniform
// 1/order weights in the geometric mean, any p_n of zero zeroes the score.
// Smoothing adds one to numerator and denominator on orders >= 2, which also
// neutralizes orders no hypothesis is long enough to reach.
inline double gleu_score(const NgramStats& total, bool smoothing = false) {
  if (total.hyp_len == 0) return 0.0;  // brevity penalty is 0
  const int order = static_cast<int>(total.numerator.size());
  double log_sum = 0.0;
  for (int n = 0; n < order; ++n) {
    long long num = std::max(0LL, total.numerator[n]);
    long long den = total.denominator[n];
    if (smoothing && n >= 1) {
      ++num;
      ++den;
    }
    if (num == 0) return 0.0;
    log_sum += std::log(static_cast<double>(num) /
                        static_cast<double>(std::max(1LL, den)));
  }
  const double bp = total.hyp_len >= total.ref_len
                        ? 1.0
                        : std::exp(1.0 - static_cast<double>(total.ref_len) /
                                             static_cast<double>(total.hyp_len));
  return bp * std::exp(log_sum / order);
}

inline double gleu_iteration(const std::vector<Sentence>& sources,
                             const std::vector<Sentence>& hypotheses,
                             const std::vector<Sentence>& sampled_refs,
                             int order = 4, bool smoothing = false) {
  if (sources.size() != hypotheses.size() || sources.size() != sampled_refs.size())
    throw ValidationError("gleu_iteration: list lengths differ (" +
                          std::to_string(sources.size()) + " sources, " +
                          std::to_string(hypotheses.size()) + " hypotheses, " +
                          std::to_string(sampled_refs.size()) + " references)");
  NgramStats total(order);
  for (std::size_t m = 0; m < sources.size(); ++m)
    total += sentence_gleu_stats(sources[m], hypotheses[m], sampled_refs[m], order);
  return gleu_score(total, smoothing);
}

struct GleuResult {
  double mean = 0.0;
  double stddev = 0.0;
  int iterations_run = 0;
};

// Multi-reference GLEU: each iteration draws one reference per sentence from
// a per-iteration SplitMix64 stream, so results are reproducible bit for bit
// across runs and platforms. All-single-reference corpora collapse to one
// exact iteration.
inline GleuResult gleu_corpus(const std::vector<Sentence>& sources,
                              const std::vector<Sentence>& hypotheses,
                              const std::vector<std::vector<Sentence>>& reference_sets,
                              const GleuParams& params = {}) {
  if (sources.size() != hypotheses.size() || sources.size() != reference_sets.size())
    throw ValidationError("gleu_corpus: list lengths differ (" +
                          std::to_string(sources.size()) + " sources, " +
                          std::to_string(hypotheses.size()) + " hypotheses, " +
                          std::to_string(reference_sets.size()) + " reference sets)");
  if (params.order < 1) throw ValidationError("gleu_corpus: order must be >= 1");
  if (params.iterations < 1)
    throw ValidationError("gleu_corpus: iterations must be >= 1");

  bool multi_ref = false;
  for (std::size_t m = 0; m < reference_sets.size(); ++m) {
    if (reference_sets[m].empty())
      throw ValidationError("gleu_corpus: sentence " + std::to_string(m + 1) +
                            " has no references");
    if (reference_sets[m].size() > 1) multi_ref = true;
  }
  const int iterations = multi_ref ? params.iterations : 1;

  // Stats depend only on (sentence, chosen reference); precompute them all so
  // each iteration is a pure integer reduction.
  std::vector<std::vector<NgramStats>> stats;
  stats.reserve(sources.size());
  for (std::size_t m = 0; m < sources.size(); ++m) {
    std::vector<NgramStats> per_ref;
    const detail::NgramCounts hyp = detail::count_ngrams(hypotheses[m], params.order);
    const detail::NgramCounts src = detail::count_ngrams(sources[m], params.order);
    per_ref.reserve(reference_sets[m].size());
    for (const Sentence& ref : reference_sets[m])
      per_ref.push_back(detail::stats_from_counts(
          hyp, src, detail::count_ngrams(ref, params.order),
          static_cast<long long>(hypotheses[m].size()),
          static_cast<long long>(ref.size()), params.order));
    stats.push_back(std::move(per_ref));
  }

  GleuResult result;
  result.iterations_run = iterations;
  std::vector<double> scores;
  scores.reserve(iterations);
  for (int k = 0; k < iterations; ++k) {
    SplitMix64 rng = iteration_stream(params.seed, k);
    NgramStats total(params.order);
    for (std::size_t m = 0; m < stats.size(); ++m) {
      const std::size_t pick =
          stats[m].size() == 1 ? 0 : rng.pick(stats[m].size());
      total += stats[m][pick];
    }
    scores.push_back(gleu_score(total, params.smoothing));
  }

  double sum = 0.0;
  for (double s : scores) sum += s;
  result.mean = sum / scores.size();
  if (scores.size() > 1) {
    double sq = 0.0;
    for (double s : scores) sq += (s - result.mean) * (s - result.mean);
    result.stddev = std::sqrt(sq / (scores.size() - 1));
  }
  return result;
}

}  // namespace gecval

#endif  // GECVAL_GLEU_HPP
