#ifndef GECVAL_WER_HPP
#define GECVAL_WER_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gecval/core.hpp"
#include "gecval/error.hpp"
#include "gecval/rational.hpp"

namespace gecval {

// Word-level Levenshtein distance, unit costs, two-row DP.
inline int edit_distance(const Sentence& x, const Sentence& y) {
  const std::size_t n = x.size(), m = y.size();
  std::vector<int> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      const int sub = prev[j - 1] + (x[i - 1] == y[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

// Which reference the per-sentence distance is taken against when a sentence
// has several of them.
enum class RefPolicy { kFirst, kMin, kMean };

inline const char* to_string(RefPolicy p) {
  switch (p) {
    case RefPolicy::kFirst: return "first";
    case RefPolicy::kMin: return "min";
    case RefPolicy::kMean: return "mean";
  }
  return "?";
}

inline std::optional<RefPolicy> parse_ref_policy(const std::string& s) {
  if (s == "first") return RefPolicy::kFirst;
  if (s == "min") return RefPolicy::kMin;
  if (s == "mean") return RefPolicy::kMean;
  return std::nullopt;
}

struct WerStats {
  Rational total_edit_distance;  // exact; integral except under kMean
  std::int64_t total_source_words = 0;
  Rational wer;
};

// Total word error rate: summed per-sentence distance against the
// policy-selected reference, divided by summed source words. Kept exact until
// report formatting.
inline WerStats wer_from_references(
    const std::vector<Sentence>& sources,
    const std::vector<std::vector<Sentence>>& references,
    RefPolicy policy = RefPolicy::kFirst, const std::string& context = "") {
  const std::string where = context.empty() ? "" : context + ": ";
  if (sources.size() != references.size())
    throw ValidationError(where + std::to_string(sources.size()) +
                          " sources but " + std::to_string(references.size()) +
                          " reference sets");
  WerStats stats;
  for (std::size_t s = 0; s < sources.size(); ++s) {
    const std::vector<Sentence>& refs = references[s];
    if (refs.empty())
      throw ValidationError(where + "sentence " + std::to_string(s + 1) +
                            " has no references");
    stats.total_source_words += static_cast<std::int64_t>(sources[s].size());
    if (policy == RefPolicy::kFirst) {
      stats.total_edit_distance =
          stats.total_edit_distance +
          Rational(edit_distance(sources[s], refs.front()));
    } else if (policy == RefPolicy::kMin) {
      int best = -1;
      for (const Sentence& ref : refs) {
        const int d = edit_distance(sources[s], ref);
        if (best < 0 || d < best) best = d;
      }
      stats.total_edit_distance = stats.total_edit_distance + Rational(best);
    } else {
      std::int64_t sum = 0;
      for (const Sentence& ref : refs) sum += edit_distance(sources[s], ref);
      stats.total_edit_distance =
          stats.total_edit_distance +
          Rational(sum, static_cast<std::int64_t>(refs.size()));
    }
  }
  if (stats.total_source_words == 0)
    throw ScoringError(where + "WER undefined, zero source words");
  stats.wer = stats.total_edit_distance / Rational(stats.total_source_words);
  return stats;
}

inline WerStats corpus_wer(const Corpus& corpus,
                           RefPolicy policy = RefPolicy::kFirst) {
  std::vector<Sentence> sources;
  std::vector<std::vector<Sentence>> references;
  sources.reserve(corpus.sentences.size());
  references.reserve(corpus.sentences.size());
  for (const AnnotatedSentence& sent : corpus.sentences) {
    if (sent.gold.empty())
      throw ValidationError("corpus '" + corpus.name +
                            "': sentence without any annotator");
    sources.push_back(sent.source);
    std::vector<Sentence> refs;
    refs.reserve(sent.gold.size());
    for (const auto& [id, edits] : sent.gold)  // ascending annotator id
      refs.push_back(apply_edits(sent.source, edits));
    references.push_back(std::move(refs));
  }
  return wer_from_references(sources, references, policy,
                             "corpus '" + corpus.name + "'");
}

// One row of the corpus-property table.
struct CorpusProperties {
  std::string name;
  std::size_t sentence_count = 0;
  std::size_t reference_count = 0;
  std::optional<double> wer;  // fraction in [0, inf); empty when undefined
  CorpusMetadata metadata;
};

inline CorpusProperties properties_from_references(
    const std::string& name, const std::vector<Sentence>& sources,
    const std::vector<std::vector<Sentence>>& references,
    const CorpusMetadata& metadata, RefPolicy policy = RefPolicy::kFirst) {
  CorpusProperties props;
  props.name = name;
  props.sentence_count = sources.size();
  for (const std::vector<Sentence>& refs : references)
    props.reference_count = std::max(props.reference_count, refs.size());
  props.metadata = metadata;
  bool has_words = false;
  for (const Sentence& s : sources)
    if (!s.empty()) has_words = true;
  if (has_words)
    props.wer = wer_from_references(sources, references, policy, name)
                    .wer.to_double();
  return props;
}

inline CorpusProperties corpus_properties(const Corpus& corpus,
                                          RefPolicy policy = RefPolicy::kFirst) {
  CorpusProperties props;
  props.name = corpus.name;
  props.sentence_count = corpus.sentences.size();
  for (const AnnotatedSentence& sent : corpus.sentences)
    props.reference_count = std::max(props.reference_count, sent.gold.size());
  props.metadata = corpus.metadata;
  bool has_words = false;
  for (const AnnotatedSentence& sent : corpus.sentences)
    if (!sent.source.empty()) has_words = true;
  if (has_words) props.wer = corpus_wer(corpus, policy).wer.to_double();
  return props;
}

}  // namespace gecval

#endif  // GECVAL_WER_HPP
