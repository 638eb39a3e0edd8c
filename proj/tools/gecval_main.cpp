// gecval: command-line front end. Subcommands: stats, score, compare,
// convert, validate. All outputs are UTF-8 with LF endings and deterministic
// given the inputs and flags.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gecval/gecval.hpp"

namespace {

using namespace gecval;

std::string beta_label(double beta) {
  std::ostringstream ss;
  ss << beta;
  return "F" + ss.str();
}

std::string stem_of(const std::filesystem::path& path) {
  const std::string stem = path.stem().string();
  return stem.empty() ? path.string() : stem;
}

std::string yes_no(bool v) { return v ? "yes" : "no"; }

std::string opt_score_or(const std::optional<double>& v, const char* missing) {
  return v ? format_score(*v) : std::string(missing);
}

void print_stats(const std::vector<CorpusProperties>& rows,
                 const std::string& format) {
  if (format == "md") {
    std::cout << "| Corpus | Sentences | References | WER | Topics | "
                 "Multiple L1 | Multiple proficiency |\n"
              << "|---|---:|---:|---:|---|---|---|\n";
    for (const CorpusProperties& p : rows)
      std::cout << "| " << p.name << " | " << p.sentence_count << " | "
                << p.reference_count << " | " << opt_score_or(p.wer, "-")
                << " | " << p.metadata.topics << " | "
                << yes_no(p.metadata.multiple_l1) << " | "
                << yes_no(p.metadata.multiple_proficiency) << " |\n";
    return;
  }
  if (format == "csv") {
    std::cout
        << "corpus,sentences,references,wer,topics,multiple_l1,multiple_proficiency\n";
    for (const CorpusProperties& p : rows)
      std::cout << detail::csv_field(p.name) << "," << p.sentence_count << ","
                << p.reference_count << "," << opt_score_or(p.wer, "") << ","
                << detail::csv_field(p.metadata.topics) << ","
                << (p.metadata.multiple_l1 ? "true" : "false") << ","
                << (p.metadata.multiple_proficiency ? "true" : "false")
                << "\n";
    return;
  }
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const CorpusProperties& p : rows) {
    nlohmann::ordered_json row;
    row["name"] = p.name;
    row["sentences"] = p.sentence_count;
    row["references"] = p.reference_count;
    row["wer"] = p.wer ? nlohmann::ordered_json(*p.wer)
                       : nlohmann::ordered_json(nullptr);
    row["topics"] = p.metadata.topics;
    row["multiple_l1"] = p.metadata.multiple_l1;
    row["multiple_proficiency"] = p.metadata.multiple_proficiency;
    doc.push_back(std::move(row));
  }
  std::cout << doc.dump(2) << "\n";
}

int cmd_stats(const std::vector<std::string>& m2_files,
              const std::string& manifest_file, const std::string& format,
              RefPolicy policy) {
  if (m2_files.empty() == manifest_file.empty())
    throw ValidationError("stats needs either --m2 or --manifest");
  std::vector<CorpusProperties> rows;
  for (const std::string& file : m2_files) {
    const M2Document doc = parse_m2_file(file);
    Corpus corpus;
    corpus.name = stem_of(file);
    corpus.sentences = doc.sentences;
    rows.push_back(corpus_properties(corpus, policy));
  }
  if (!manifest_file.empty()) {
    const RunManifest manifest = load_manifest(manifest_file);
    for (const CorpusEntry& entry : manifest.corpora) {
      const LoadedCorpus loaded = load_corpus(entry);
      rows.push_back(properties_from_references(loaded.name, loaded.sources,
                                                loaded.references,
                                                loaded.metadata, policy));
    }
  }
  print_stats(rows, format);
  return 0;
}

struct ScoreFlags {
  std::string m2_file, hyp_file;
  std::vector<std::string> metrics;
  double beta = 0.5;
  int max_unchanged = 2;
  bool case_insensitive = false;
  int order = 4;
  int iterations = 500;
  std::uint64_t seed = kDefaultGleuSeed;
  bool smoothing = false;
  RefPolicy policy = RefPolicy::kFirst;
  int jobs = 1;
};

int cmd_score(const ScoreFlags& flags) {
  const M2Document doc = parse_m2_file(flags.m2_file);
  Corpus corpus;
  corpus.name = stem_of(flags.m2_file);
  corpus.sentences = doc.sentences;
  const std::vector<Sentence> hyp =
      load_hypotheses(flags.hyp_file, corpus.sentences.size(),
                      "corpus '" + corpus.name + "'");

  std::vector<std::string> metrics = flags.metrics;
  if (metrics.empty()) metrics = {"f_beta"};

  std::vector<Sentence> sources;
  std::vector<std::vector<Sentence>> references;
  for (const AnnotatedSentence& sent : corpus.sentences) {
    sources.push_back(sent.source);
    references.push_back(reference_sentences(sent));
  }

  for (const std::string& metric : metrics) {
    if (metric == "f_beta") {
      HypothesisSet hset;
      hset.system_name = "cli";
      hset.sentences = hyp;
      MatchParams params;
      params.beta = flags.beta;
      params.max_unchanged_words = flags.max_unchanged;
      params.case_insensitive = flags.case_insensitive;
      const CorpusScore score = score_corpus(corpus, hset, params, flags.jobs);
      std::cout << "P " << format_score(score.precision) << ", R "
                << format_score(score.recall) << ", " << beta_label(flags.beta)
                << " " << format_score(score.f) << "\n";
    } else if (metric == "gleu") {
      GleuParams params;
      params.order = flags.order;
      params.iterations = flags.iterations;
      params.seed = flags.seed;
      params.smoothing = flags.smoothing;
      const GleuResult g = gleu_corpus(sources, hyp, references, params);
      std::cout << "GLEU " << format_score(g.mean) << " (std "
                << format_score(g.stddev) << " over " << g.iterations_run
                << " iterations)\n";
    } else {
      const WerStats stats =
          wer_from_references(sources, references, flags.policy, corpus.name);
      std::cout << "WER " << format_score(stats.wer.to_double()) << "\n";
    }
  }
  return 0;
}

int cmd_compare(const std::string& manifest_file, std::string out_dir,
                int jobs, bool keep_going) {
  if (out_dir.empty()) {
    if (const char* env = std::getenv("GECVAL_OUT"))
      out_dir = env;
    if (out_dir.empty()) out_dir = "gecval-report";
  }
  const RunManifest manifest = load_manifest(manifest_file);
  const CompareOutcome outcome =
      run_compare(manifest, out_dir, jobs, keep_going);

  for (const RankingTable& table : outcome.rankings) {
    if (table.top_disagreement)
      std::cout << table.metric
                << ": corpora DISAGREE on the top system\n";
    else
      std::cout << table.metric << ": all corpora agree on the top system ("
                << table.per_corpus.front().order.front().first << ")\n";
  }
  for (const std::string& note : outcome.notes)
    std::cout << "note: " << note << "\n";
  std::cout << "report written to " << outcome.out_dir.string() << "\n";

  if (!outcome.evaluation.failures.empty()) {
    for (const std::string& failure : outcome.evaluation.failures)
      std::cerr << "gecval: scoring: " << failure << "\n";
    return static_cast<int>(ExitStatus::kScoring);
  }
  return 0;
}

int cmd_convert(const std::string& m2_file, const std::string& out_prefix,
                const std::string& policy_name) {
  const AnnotatorPolicy policy = policy_name == "first"
                                     ? AnnotatorPolicy::kFirst
                                     : AnnotatorPolicy::kAll;
  const M2Document doc = parse_m2_file(m2_file);
  const ParallelText parallel = to_parallel(doc, policy);

  auto write_lines = [](const std::filesystem::path& path,
                        const std::vector<std::string>& lines) {
    std::string text;
    for (const std::string& line : lines) text += line + "\n";
    write_text_file(path, text);
  };
  const std::filesystem::path src_path = out_prefix + ".src.txt";
  write_lines(src_path, parallel.sources);
  std::cout << "wrote " << src_path.string() << " (" << parallel.sources.size()
            << " lines)\n";
  for (std::size_t k = 0; k < parallel.annotator_ids.size(); ++k) {
    const std::filesystem::path ref_path =
        out_prefix + ".ref" + std::to_string(parallel.annotator_ids[k]) +
        ".txt";
    write_lines(ref_path, parallel.references[k]);
    std::cout << "wrote " << ref_path.string() << " ("
              << parallel.references[k].size() << " lines)\n";
  }
  if (parallel.annotator_ids.empty())
    std::cout << "no annotators found, no reference files written\n";
  return 0;
}

int cmd_validate(const std::vector<std::string>& m2_files,
                 const std::vector<std::string>& manifest_files,
                 const std::vector<std::string>& hyp_files) {
  if (m2_files.empty() && manifest_files.empty() && hyp_files.empty())
    throw ValidationError("validate needs --m2, --manifest or --hyp");
  if (!hyp_files.empty() && m2_files.size() != 1)
    throw ValidationError(
        "--hyp needs exactly one --m2 corpus to check line counts against");

  std::vector<std::string> problems;
  std::size_t checked = 0;
  std::optional<std::size_t> corpus_size;
  for (const std::string& file : m2_files) {
    ++checked;
    const std::string text = read_text_file(file);
    std::vector<std::string> found = validate_m2_text(text, file);
    if (found.empty()) corpus_size = parse_m2(text, file).sentences.size();
    problems.insert(problems.end(), found.begin(), found.end());
  }
  for (const std::string& file : manifest_files) {
    ++checked;
    try {
      (void)load_manifest(file);
    } catch (const Error& e) {
      problems.push_back(file + ": " + e.what());
    }
  }
  for (const std::string& file : hyp_files) {
    ++checked;
    if (!corpus_size) {
      problems.push_back(file + ": line count not checked, the --m2 corpus "
                         "did not validate");
      continue;
    }
    const std::size_t lines = split_lines(read_text_file(file)).size();
    if (lines != *corpus_size)
      problems.push_back(file + ": " + std::to_string(lines) +
                         " lines, but the corpus has " +
                         std::to_string(*corpus_size) + " sentences");
  }

  for (const std::string& problem : problems) std::cout << problem << "\n";
  if (problems.empty()) {
    std::cout << "validated " << checked << " file(s): no problems found\n";
    return 0;
  }
  return static_cast<int>(ExitStatus::kValidation);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "gecval: cross-corpora evaluation for grammatical error correction"};
  app.set_version_flag("--version", "gecval 0.1.0");
  app.require_subcommand(1);

  // stats
  auto* stats = app.add_subcommand(
      "stats", "Corpus properties: sentences, references, WER, metadata");
  std::vector<std::string> stats_m2;
  std::string stats_manifest, stats_format = "md";
  std::string stats_policy = "first";
  stats->add_option("--m2", stats_m2, "M2 corpus file(s), one row each");
  stats->add_option("--manifest", stats_manifest,
                    "evaluation manifest, one row per corpus");
  stats->add_option("--format", stats_format, "output format")
      ->check(CLI::IsMember({"csv", "md", "json"}));
  stats->add_option("--ref-policy", stats_policy,
                    "reference policy for WER")
      ->check(CLI::IsMember({"first", "min", "mean"}));

  // score
  auto* score = app.add_subcommand(
      "score", "Score one hypothesis file against one M2 corpus");
  ScoreFlags sf;
  score->add_option("--m2", sf.m2_file, "M2 corpus file")->required();
  score->add_option("--hyp", sf.hyp_file, "hypothesis file, one sentence per line")
      ->required();
  score->add_option("--metric", sf.metrics,
                    "metric(s) to print (default: f_beta)")
      ->check(CLI::IsMember({"f_beta", "gleu", "wer"}))
      ->delimiter(',');
  score->add_option("--beta", sf.beta, "F-score beta (default 0.5)");
  score->add_option("--max-unchanged", sf.max_unchanged,
                    "max unchanged words inside one edit (default 2)");
  score->add_flag("--case-insensitive", sf.case_insensitive,
                  "fold ASCII case before matching");
  score->add_option("--order", sf.order, "largest n-gram order (default 4)");
  score->add_option("--iterations", sf.iterations,
                    "GLEU sampling iterations (default 500)");
  score->add_option("--seed", sf.seed, "GLEU sampling seed (default 12345)");
  score->add_flag("--smoothing", sf.smoothing, "GLEU +1 smoothing for n >= 2");
  std::string score_policy = "first";
  score->add_option("--ref-policy", score_policy, "reference policy for WER")
      ->check(CLI::IsMember({"first", "min", "mean"}));
  sf.jobs = default_jobs();
  score->add_option("--jobs", sf.jobs, "worker threads");

  // compare
  auto* compare = app.add_subcommand(
      "compare", "Evaluate every system of a manifest and write reports");
  std::string compare_manifest, compare_out;
  int compare_jobs = default_jobs();
  bool keep_going = false;
  compare->add_option("--manifest", compare_manifest, "evaluation manifest")
      ->required();
  compare->add_option(
      "--out", compare_out,
      "output directory (default: $GECVAL_OUT, else ./gecval-report)");
  compare->add_option("--jobs", compare_jobs, "worker threads");
  compare->add_flag("--keep-going", keep_going,
                    "skip failing entries instead of aborting");

  // convert
  auto* convert = app.add_subcommand(
      "convert", "Write parallel source/reference text files from an M2 corpus");
  std::string convert_m2, convert_out, convert_policy = "all";
  convert->add_option("--m2", convert_m2, "M2 corpus file")->required();
  convert->add_option("--out", convert_out, "output path prefix")->required();
  convert->add_option("--policy", convert_policy,
                      "which annotators become reference files")
      ->check(CLI::IsMember({"all", "first"}));

  // validate
  auto* validate = app.add_subcommand(
      "validate", "Check M2, manifest and hypothesis files, print every problem");
  std::vector<std::string> validate_m2, validate_manifest, validate_hyp;
  validate->add_option("--m2", validate_m2, "M2 corpus file(s)");
  validate->add_option("--manifest", validate_manifest, "manifest file(s)");
  validate->add_option("--hyp", validate_hyp,
                       "hypothesis file(s), line-counted against the --m2 corpus");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(gecval::ExitStatus::kValidation);
  }

  try {
    if (stats->parsed())
      return cmd_stats(stats_m2, stats_manifest, stats_format,
                       *parse_ref_policy(stats_policy));
    if (score->parsed()) {
      sf.policy = *parse_ref_policy(score_policy);
      return cmd_score(sf);
    }
    if (compare->parsed())
      return cmd_compare(compare_manifest, compare_out, compare_jobs,
                         keep_going);
    if (convert->parsed())
      return cmd_convert(convert_m2, convert_out, convert_policy);
    return cmd_validate(validate_m2, validate_manifest, validate_hyp);
  } catch (const gecval::Error& e) {
    std::cerr << "gecval: " << e.kind() << ": " << e.what() << "\n";
    return static_cast<int>(e.status());
  } catch (const std::exception& e) {
    std::cerr << "gecval: internal: " << e.what() << "\n";
    return static_cast<int>(gecval::ExitStatus::kScoring);
  }
}
