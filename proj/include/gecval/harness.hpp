#ifndef GECVAL_HARNESS_HPP
#define GECVAL_HARNESS_HPP

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gecval/core.hpp"
#include "gecval/error.hpp"
#include "gecval/format.hpp"
#include "gecval/gleu.hpp"
#include "gecval/manifest.hpp"
#include "gecval/maxmatch.hpp"
#include "gecval/parallel.hpp"
#include "gecval/wer.hpp"

namespace gecval {

// One (system, corpus, run) evaluation. Metrics that were not requested, or
// do not apply, stay empty. corpus_wer_value repeats the corpus-level gold
// WER on every row of that corpus: it contextualizes scores, it does not
// score the system.
struct MetricReport {
  std::string system;
  std::string corpus;
  int run_id = 0;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f;
  std::optional<double> gleu_mean;
  std::optional<double> gleu_std;
  std::optional<double> corpus_wer_value;
};

struct EvaluationResult {
  std::vector<MetricReport> rows;
  std::vector<CorpusProperties> corpus_properties;  // manifest corpus order
  std::vector<std::string> failures;                // only with keep_going
};

// Scores every (system, corpus, run) triple of the manifest. Triples run in
// parallel; results land in per-triple slots, so output order and content are
// independent of scheduling. A failing triple aborts everything unless
// keep_going is set, in which case it is skipped and reported.
inline EvaluationResult evaluate(const RunManifest& manifest, int jobs = 1,
                                 bool keep_going = false) {
  std::vector<LoadedCorpus> corpora;
  corpora.reserve(manifest.corpora.size());
  for (const CorpusEntry& entry : manifest.corpora)
    corpora.push_back(load_corpus(entry));

  EvaluationResult result;
  for (const LoadedCorpus& c : corpora)
    result.corpus_properties.push_back(properties_from_references(
        c.name, c.sources, c.references, c.metadata,
        manifest.params.ref_policy));

  struct Task {
    std::size_t system, run, corpus;
  };
  std::vector<Task> tasks;
  for (std::size_t s = 0; s < manifest.systems.size(); ++s)
    for (std::size_t r = 0; r < manifest.systems[s].runs.size(); ++r)
      for (std::size_t c = 0; c < manifest.corpora.size(); ++c)
        tasks.push_back({s, r, c});

  std::vector<std::optional<MetricReport>> slots(tasks.size());
  std::vector<std::string> errors(tasks.size());

  MatchParams match_params;
  match_params.beta = manifest.params.beta;
  match_params.max_unchanged_words = manifest.params.max_unchanged_words;
  match_params.case_insensitive = manifest.params.case_insensitive;
  GleuParams gleu_params;
  gleu_params.order = manifest.params.order;
  gleu_params.iterations = manifest.params.iterations;
  gleu_params.seed = manifest.params.seed;
  gleu_params.smoothing = manifest.params.smoothing;

  parallel_for(tasks.size(), jobs, [&](std::size_t t) {
    const Task& task = tasks[t];
    const SystemEntry& sys = manifest.systems[task.system];
    const RunEntry& run = sys.runs[task.run];
    const LoadedCorpus& corpus = corpora[task.corpus];
    const std::string context = "system '" + sys.name + "' run " +
                                std::to_string(run.id) + " on corpus '" +
                                corpus.name + "'";
    try {
      const std::vector<Sentence> hyp = load_hypotheses(
          run.hypotheses.at(corpus.name), corpus.sources.size(), context);
      MetricReport row;
      row.system = sys.name;
      row.corpus = corpus.name;
      row.run_id = run.id;
      if (manifest.want_f_beta) {
        HypothesisSet hset;
        hset.system_name = sys.name;
        hset.run_id = run.id;
        hset.sentences = hyp;
        const CorpusScore score =
            score_corpus(corpus.corpus, hset, match_params, 1);
        row.precision = score.precision;
        row.recall = score.recall;
        row.f = score.f;
      }
      if (manifest.want_gleu) {
        const GleuResult g =
            gleu_corpus(corpus.sources, hyp, corpus.references, gleu_params);
        row.gleu_mean = g.mean;
        row.gleu_std = g.stddev;
      }
      if (manifest.want_wer)
        row.corpus_wer_value = result.corpus_properties[task.corpus].wer;
      slots[t] = std::move(row);
    } catch (const Error& e) {
      errors[t] = context + ": " + e.what();
    }
  });

  std::vector<std::string> failures;
  for (std::size_t t = 0; t < tasks.size(); ++t)
    if (!errors[t].empty()) failures.push_back(errors[t]);
  if (!failures.empty() && !keep_going) {
    std::string msg = failures.front();
    if (failures.size() > 1)
      msg += " (and " + std::to_string(failures.size() - 1) + " more)";
    throw ScoringError(msg);
  }
  for (std::size_t t = 0; t < tasks.size(); ++t)
    if (slots[t]) result.rows.push_back(std::move(*slots[t]));
  result.failures = std::move(failures);
  return result;
}

struct AggregateRow {
  std::string system;
  std::string corpus;
  int runs = 0;
  std::optional<double> precision_mean, precision_std;
  std::optional<double> recall_mean, recall_std;
  std::optional<double> f_mean, f_std;
  std::optional<double> gleu_mean, gleu_std;
  std::optional<double> corpus_wer_value;
};

namespace detail {

// Arithmetic mean and sample standard deviation (n-1 denominator, 0 for a
// single value).
inline std::pair<double, double> mean_std(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) return {mean, 0.0};
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return {mean, std::sqrt(sq / static_cast<double>(values.size() - 1))};
}

inline void fill_stat(const std::vector<double>& values,
                      std::optional<double>& mean, std::optional<double>& std) {
  if (values.empty()) return;
  const auto [m, s] = mean_std(values);
  mean = m;
  std = s;
}

}  // namespace detail

// Collapses runs: per (system, corpus), the mean and sample std of each
// metric over run values. Mean-of-F is the mean of per-run F values, not the
// F of pooled counts; the two genuinely differ.
inline std::vector<AggregateRow> aggregate_runs(
    const std::vector<MetricReport>& rows) {
  std::vector<std::pair<std::string, std::string>> order;
  std::map<std::pair<std::string, std::string>, std::vector<const MetricReport*>>
      groups;
  for (const MetricReport& row : rows) {
    const auto key = std::make_pair(row.system, row.corpus);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&row);
  }

  std::vector<AggregateRow> out;
  out.reserve(order.size());
  for (const auto& key : order) {
    const auto& members = groups.at(key);
    AggregateRow agg;
    agg.system = key.first;
    agg.corpus = key.second;
    agg.runs = static_cast<int>(members.size());
    std::vector<double> p, r, f, g;
    for (const MetricReport* row : members) {
      if (row->precision) p.push_back(*row->precision);
      if (row->recall) r.push_back(*row->recall);
      if (row->f) f.push_back(*row->f);
      if (row->gleu_mean) g.push_back(*row->gleu_mean);
      if (row->corpus_wer_value) agg.corpus_wer_value = row->corpus_wer_value;
    }
    detail::fill_stat(p, agg.precision_mean, agg.precision_std);
    detail::fill_stat(r, agg.recall_mean, agg.recall_std);
    detail::fill_stat(f, agg.f_mean, agg.f_std);
    detail::fill_stat(g, agg.gleu_mean, agg.gleu_std);
    out.push_back(std::move(agg));
  }
  return out;
}

// Tie-corrected rank correlation of two score vectors over the same items.
// Returns 0 when either vector is entirely tied (the correlation is
// undefined there; 0 keeps reports total).
inline double kendall_tau_b(const std::vector<double>& x,
                            const std::vector<double>& y) {
  if (x.size() != y.size())
    throw ValidationError("kendall_tau_b: length mismatch");
  const std::size_t n = x.size();
  long long concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0.0) ++ties_x;
      if (dy == 0.0) ++ties_y;
      if (dx == 0.0 || dy == 0.0) continue;
      if ((dx > 0.0) == (dy > 0.0))
        ++concordant;
      else
        ++discordant;
    }
  }
  const long long n0 = static_cast<long long>(n) * (n - 1) / 2;
  const double denom = std::sqrt(static_cast<double>(n0 - ties_x)) *
                       std::sqrt(static_cast<double>(n0 - ties_y));
  if (denom == 0.0) return 0.0;
  return static_cast<double>(concordant - discordant) / denom;
}

struct RankedCorpus {
  std::string corpus;
  std::vector<std::pair<std::string, double>> order;  // best first
};

struct RankingTable {
  std::string metric;
  std::vector<RankedCorpus> per_corpus;
  std::vector<std::vector<double>> tau;  // corpus x corpus, tau-b
  bool top_disagreement = false;
};

// Per-corpus descending sort by the aggregated metric (ties by system name),
// plus the tau-b matrix between corpus rankings and a flag raised when any
// two corpora crown different top systems.
inline RankingTable rank_systems(const std::vector<AggregateRow>& aggregated,
                                 const std::string& metric) {
  auto value_of = [&](const AggregateRow& row) -> std::optional<double> {
    if (metric == "f_beta") return row.f_mean;
    if (metric == "gleu") return row.gleu_mean;
    throw ValidationError("rank_systems: unknown metric \"" + metric +
                          "\" (expected f_beta or gleu)");
  };

  std::vector<std::string> systems, corpora;
  std::map<std::pair<std::string, std::string>, double> cell;
  for (const AggregateRow& row : aggregated) {
    if (std::find(systems.begin(), systems.end(), row.system) == systems.end())
      systems.push_back(row.system);
    if (std::find(corpora.begin(), corpora.end(), row.corpus) == corpora.end())
      corpora.push_back(row.corpus);
    const std::optional<double> v = value_of(row);
    if (v) cell[{row.system, row.corpus}] = *v;
  }
  std::string holes;
  for (const std::string& s : systems)
    for (const std::string& c : corpora)
      if (!cell.count({s, c}))
        holes += (holes.empty() ? "" : ", ") + ("'" + s + "' on '" + c + "'");
  if (!holes.empty())
    throw ScoringError("rank_systems: no " + metric + " value for " + holes);

  RankingTable table;
  table.metric = metric;
  for (const std::string& c : corpora) {
    RankedCorpus ranked;
    ranked.corpus = c;
    for (const std::string& s : systems)
      ranked.order.emplace_back(s, cell.at({s, c}));
    std::sort(ranked.order.begin(), ranked.order.end(),
              [](const auto& a, const auto& b) {
                if (a.second != b.second) return a.second > b.second;
                return a.first < b.first;
              });
    table.per_corpus.push_back(std::move(ranked));
  }

  std::vector<std::vector<double>> scores(corpora.size());
  for (std::size_t c = 0; c < corpora.size(); ++c)
    for (const std::string& s : systems)
      scores[c].push_back(cell.at({s, corpora[c]}));
  table.tau.assign(corpora.size(), std::vector<double>(corpora.size(), 0.0));
  for (std::size_t a = 0; a < corpora.size(); ++a)
    for (std::size_t b = 0; b < corpora.size(); ++b)
      table.tau[a][b] = kendall_tau_b(scores[a], scores[b]);

  for (std::size_t c = 1; c < table.per_corpus.size(); ++c)
    if (table.per_corpus[c].order.front().first !=
        table.per_corpus.front().order.front().first)
      table.top_disagreement = true;
  return table;
}

struct WerExtremesRow {
  std::string system;
  std::optional<double> low_p, low_r, low_f;
  std::optional<double> high_p, high_r, high_f;
};

struct WerExtremes {
  std::string low_corpus, high_corpus;
  double low_wer = 0.0, high_wer = 0.0;
  bool tie = false;  // extremes decided by name because of equal WER
  std::vector<WerExtremesRow> rows;
};

// Side-by-side system scores on the corpora with the lowest and highest gold
// WER. Needs at least two corpora with a defined WER.
inline WerExtremes wer_extremes_report(
    const std::vector<AggregateRow>& aggregated,
    const std::vector<CorpusProperties>& props) {
  std::vector<std::pair<double, std::string>> with_wer;
  for (const CorpusProperties& p : props)
    if (p.wer) with_wer.emplace_back(*p.wer, p.name);
  if (with_wer.size() < 2)
    throw ScoringError(
        "wer extremes need at least two corpora with a defined WER, got " +
        std::to_string(with_wer.size()));
  std::sort(with_wer.begin(), with_wer.end());

  WerExtremes extremes;
  extremes.low_wer = with_wer.front().first;
  extremes.low_corpus = with_wer.front().second;
  const auto high = std::min_element(
      with_wer.begin(), with_wer.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
      });
  extremes.high_wer = high->first;
  extremes.high_corpus = high->second;
  extremes.tie = with_wer[1].first == with_wer[0].first ||
                 std::count_if(with_wer.begin(), with_wer.end(),
                               [&](const auto& p) {
                                 return p.first == extremes.high_wer;
                               }) > 1;

  std::vector<std::string> systems;
  std::map<std::pair<std::string, std::string>, const AggregateRow*> cell;
  for (const AggregateRow& row : aggregated) {
    if (std::find(systems.begin(), systems.end(), row.system) == systems.end())
      systems.push_back(row.system);
    cell[{row.system, row.corpus}] = &row;
  }
  for (const std::string& s : systems) {
    WerExtremesRow row;
    row.system = s;
    if (const auto it = cell.find({s, extremes.low_corpus}); it != cell.end()) {
      row.low_p = it->second->precision_mean;
      row.low_r = it->second->recall_mean;
      row.low_f = it->second->f_mean;
    }
    if (const auto it = cell.find({s, extremes.high_corpus}); it != cell.end()) {
      row.high_p = it->second->precision_mean;
      row.high_r = it->second->recall_mean;
      row.high_f = it->second->f_mean;
    }
    extremes.rows.push_back(std::move(row));
  }
  return extremes;
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

inline std::string opt_score(const std::optional<double>& v) {
  return v ? format_score(*v) : std::string();
}

}  // namespace detail

inline std::string scores_csv(const EvaluationResult& result) {
  std::string out =
      "system,corpus,run,precision,recall,f_beta,gleu,gleu_std,corpus_wer\n";
  for (const MetricReport& row : result.rows) {
    out += detail::csv_field(row.system) + "," + detail::csv_field(row.corpus) +
           "," + std::to_string(row.run_id) + "," +
           detail::opt_score(row.precision) + "," +
           detail::opt_score(row.recall) + "," + detail::opt_score(row.f) +
           "," + detail::opt_score(row.gleu_mean) + "," +
           detail::opt_score(row.gleu_std) + "," +
           detail::opt_score(row.corpus_wer_value) + "\n";
  }
  return out;
}

inline std::string rankings_markdown(const std::vector<RankingTable>& tables) {
  std::string out = "# System rankings per corpus\n";
  if (tables.empty())
    out += "\nNo rankable metric was requested.\n";
  for (const RankingTable& table : tables) {
    out += "\n## By " + table.metric + "\n\n";
    std::size_t depth = 0;
    for (const RankedCorpus& rc : table.per_corpus)
      depth = std::max(depth, rc.order.size());
    out += "| Rank |";
    for (const RankedCorpus& rc : table.per_corpus) out += " " + rc.corpus + " |";
    out += "\n|---:|";
    for (std::size_t c = 0; c < table.per_corpus.size(); ++c) out += "---|";
    out += "\n";
    for (std::size_t rank = 0; rank < depth; ++rank) {
      out += "| " + std::to_string(rank + 1) + " |";
      for (const RankedCorpus& rc : table.per_corpus) {
        if (rank < rc.order.size())
          out += " " + rc.order[rank].first + " (" +
                 format_score(rc.order[rank].second) + ") |";
        else
          out += " |";
      }
      out += "\n";
    }
    out += "\nKendall tau-b between corpus rankings:\n\n| |";
    for (const RankedCorpus& rc : table.per_corpus) out += " " + rc.corpus + " |";
    out += "\n|---|";
    for (std::size_t c = 0; c < table.per_corpus.size(); ++c) out += "---:|";
    out += "\n";
    for (std::size_t a = 0; a < table.per_corpus.size(); ++a) {
      out += "| " + table.per_corpus[a].corpus + " |";
      for (std::size_t b = 0; b < table.per_corpus.size(); ++b)
        out += " " + format_fixed(table.tau[a][b], 2) + " |";
      out += "\n";
    }
    out += "\nTop system agreement: ";
    out += table.top_disagreement
               ? "corpora DISAGREE on the best system.\n"
               : "all corpora agree on the best system.\n";
  }
  return out;
}

namespace detail {

inline void bold_maxima(std::vector<std::vector<std::string>>& cells,
                        const std::vector<std::vector<std::optional<double>>>& values) {
  if (values.empty()) return;
  const std::size_t cols = values.front().size();
  for (std::size_t col = 0; col < cols; ++col) {
    std::optional<double> best;
    for (const auto& row : values)
      if (row[col] && (!best || *row[col] > *best)) best = row[col];
    if (!best) continue;
    for (std::size_t r = 0; r < values.size(); ++r)
      if (values[r][col] && *values[r][col] == *best)
        cells[r][col] = "**" + cells[r][col] + "**";
  }
}

}  // namespace detail

inline std::string extremes_markdown(const WerExtremes& extremes) {
  std::string out = "# Systems at the WER extremes\n\n";
  out += "Lowest-WER corpus: " + extremes.low_corpus + " (" +
         format_score(extremes.low_wer) + "). Highest-WER corpus: " +
         extremes.high_corpus + " (" + format_score(extremes.high_wer) + ").\n";
  if (extremes.tie)
    out += "\nEqual WER values were split by corpus name (lexicographically "
           "lower name wins).\n";
  out += "\n| System | P (low) | R (low) | F (low) | P (high) | R (high) | F "
         "(high) |\n|---|---:|---:|---:|---:|---:|---:|\n";

  std::vector<std::vector<std::optional<double>>> values;
  std::vector<std::vector<std::string>> cells;
  for (const WerExtremesRow& row : extremes.rows) {
    values.push_back({row.low_p, row.low_r, row.low_f, row.high_p, row.high_r,
                      row.high_f});
    std::vector<std::string> text;
    for (const auto& v : values.back())
      text.push_back(v ? format_score(*v) : std::string("-"));
    cells.push_back(std::move(text));
  }
  detail::bold_maxima(cells, values);
  for (std::size_t r = 0; r < extremes.rows.size(); ++r) {
    out += "| " + extremes.rows[r].system + " |";
    for (const std::string& cell : cells[r]) out += " " + cell + " |";
    out += "\n";
  }
  bool any_f = false;
  for (const auto& row : values)
    for (const auto& v : row)
      if (v) any_f = true;
  if (!any_f)
    out += "\nNo precision/recall/F values were computed (the f_beta metric "
           "was not requested).\n";
  return out;
}

namespace detail {

inline nlohmann::ordered_json opt_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

}  // namespace detail

inline std::string report_json(const RunManifest& manifest,
                               const EvaluationResult& result,
                               const std::vector<AggregateRow>& aggregated,
                               const std::vector<RankingTable>& rankings,
                               const std::optional<WerExtremes>& extremes) {
  nlohmann::ordered_json doc;
  doc["parameters"] = {
      {"beta", manifest.params.beta},
      {"max_unchanged_words", manifest.params.max_unchanged_words},
      {"case_insensitive", manifest.params.case_insensitive},
      {"order", manifest.params.order},
      {"iterations", manifest.params.iterations},
      {"seed", manifest.params.seed},
      {"smoothing", manifest.params.smoothing},
      {"ref_policy", to_string(manifest.params.ref_policy)},
  };

  doc["corpora"] = nlohmann::ordered_json::array();
  for (const CorpusProperties& p : result.corpus_properties) {
    nlohmann::ordered_json c;
    c["name"] = p.name;
    c["sentences"] = p.sentence_count;
    c["references"] = p.reference_count;
    c["wer"] = detail::opt_json(p.wer);
    c["topics"] = p.metadata.topics;
    c["multiple_l1"] = p.metadata.multiple_l1;
    c["multiple_proficiency"] = p.metadata.multiple_proficiency;
    doc["corpora"].push_back(std::move(c));
  }

  doc["scores"] = nlohmann::ordered_json::array();
  for (const MetricReport& row : result.rows) {
    nlohmann::ordered_json r;
    r["system"] = row.system;
    r["corpus"] = row.corpus;
    r["run"] = row.run_id;
    r["precision"] = detail::opt_json(row.precision);
    r["recall"] = detail::opt_json(row.recall);
    r["f_beta"] = detail::opt_json(row.f);
    r["gleu"] = detail::opt_json(row.gleu_mean);
    r["gleu_std"] = detail::opt_json(row.gleu_std);
    r["corpus_wer"] = detail::opt_json(row.corpus_wer_value);
    doc["scores"].push_back(std::move(r));
  }

  doc["aggregates"] = nlohmann::ordered_json::array();
  for (const AggregateRow& row : aggregated) {
    nlohmann::ordered_json r;
    r["system"] = row.system;
    r["corpus"] = row.corpus;
    r["runs"] = row.runs;
    r["precision"] = {{"mean", detail::opt_json(row.precision_mean)},
                      {"std", detail::opt_json(row.precision_std)}};
    r["recall"] = {{"mean", detail::opt_json(row.recall_mean)},
                   {"std", detail::opt_json(row.recall_std)}};
    r["f_beta"] = {{"mean", detail::opt_json(row.f_mean)},
                   {"std", detail::opt_json(row.f_std)}};
    r["gleu"] = {{"mean", detail::opt_json(row.gleu_mean)},
                 {"std", detail::opt_json(row.gleu_std)}};
    r["corpus_wer"] = detail::opt_json(row.corpus_wer_value);
    doc["aggregates"].push_back(std::move(r));
  }

  doc["rankings"] = nlohmann::ordered_json::array();
  for (const RankingTable& table : rankings) {
    nlohmann::ordered_json t;
    t["metric"] = table.metric;
    t["per_corpus"] = nlohmann::ordered_json::array();
    for (const RankedCorpus& rc : table.per_corpus) {
      nlohmann::ordered_json entry;
      entry["corpus"] = rc.corpus;
      entry["systems"] = nlohmann::ordered_json::array();
      for (const auto& [name, score] : rc.order)
        entry["systems"].push_back({{"system", name}, {"score", score}});
      t["per_corpus"].push_back(std::move(entry));
    }
    t["tau"] = table.tau;
    t["top_system_disagreement"] = table.top_disagreement;
    doc["rankings"].push_back(std::move(t));
  }

  if (extremes) {
    nlohmann::ordered_json e;
    e["low_corpus"] = extremes->low_corpus;
    e["low_wer"] = extremes->low_wer;
    e["high_corpus"] = extremes->high_corpus;
    e["high_wer"] = extremes->high_wer;
    e["tie_broken_by_name"] = extremes->tie;
    e["systems"] = nlohmann::ordered_json::array();
    for (const WerExtremesRow& row : extremes->rows) {
      nlohmann::ordered_json r;
      r["system"] = row.system;
      r["low"] = {{"precision", detail::opt_json(row.low_p)},
                  {"recall", detail::opt_json(row.low_r)},
                  {"f_beta", detail::opt_json(row.low_f)}};
      r["high"] = {{"precision", detail::opt_json(row.high_p)},
                   {"recall", detail::opt_json(row.high_r)},
                   {"f_beta", detail::opt_json(row.high_f)}};
      e["systems"].push_back(std::move(r));
    }
    doc["wer_extremes"] = std::move(e);
  } else {
    doc["wer_extremes"] = nullptr;
  }

  doc["failures"] = result.failures;
  return doc.dump(2) + "\n";
}

struct CompareOutcome {
  std::filesystem::path out_dir;
  EvaluationResult evaluation;
  std::vector<AggregateRow> aggregated;
  std::vector<RankingTable> rankings;
  std::optional<WerExtremes> extremes;
  std::vector<std::string> notes;  // human-readable oddities (skipped parts)
};

// The whole protocol: evaluate, aggregate, rank per rankable metric, locate
// the WER extremes, and write scores.csv, rankings.md, extremes.md and
// report.json into out_dir. Output bytes depend only on the manifest.
inline CompareOutcome run_compare(const RunManifest& manifest,
                                  const std::filesystem::path& out_dir,
                                  int jobs = 1, bool keep_going = false) {
  CompareOutcome outcome;
  outcome.out_dir = out_dir;
  outcome.evaluation = evaluate(manifest, jobs, keep_going);
  outcome.aggregated = aggregate_runs(outcome.evaluation.rows);

  std::vector<std::string> metrics;
  if (manifest.want_f_beta) metrics.push_back("f_beta");
  if (manifest.want_gleu) metrics.push_back("gleu");
  for (const std::string& metric : metrics) {
    try {
      outcome.rankings.push_back(rank_systems(outcome.aggregated, metric));
    } catch (const ScoringError& e) {
      if (!keep_going) throw;
      outcome.notes.push_back(std::string("rankings by ") + metric +
                              " skipped: " + e.what());
    }
  }

  int with_wer = 0;
  for (const CorpusProperties& p : outcome.evaluation.corpus_properties)
    if (p.wer) ++with_wer;
  if (with_wer >= 2)
    outcome.extremes =
        wer_extremes_report(outcome.aggregated, outcome.evaluation.corpus_properties);
  else
    outcome.notes.push_back(
        "wer extremes skipped: fewer than two corpora have a defined WER");

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec)
    throw IoError("cannot create output directory '" + out_dir.string() +
                  "': " + ec.message());
  write_text_file(out_dir / "scores.csv", scores_csv(outcome.evaluation));
  write_text_file(out_dir / "rankings.md", rankings_markdown(outcome.rankings));
  std::string extremes_text;
  if (outcome.extremes) {
    extremes_text = extremes_markdown(*outcome.extremes);
  } else {
    extremes_text = "# Systems at the WER extremes\n\nSkipped: fewer than two "
                    "corpora have a defined WER.\n";
  }
  write_text_file(out_dir / "extremes.md", extremes_text);
  write_text_file(out_dir / "report.json",
                  report_json(manifest, outcome.evaluation, outcome.aggregated,
                              outcome.rankings, outcome.extremes));
  return outcome;
}

}  // namespace gecval

#endif  // GECVAL_HARNESS_HPP
