#ifndef GECVAL_MANIFEST_HPP
#define GECVAL_MANIFEST_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "gecval/core.hpp"
#include "gecval/error.hpp"
#include "gecval/gleu.hpp"
#include "gecval/io.hpp"
#include "gecval/m2.hpp"
#include "gecval/wer.hpp"

namespace gecval {

enum class CorpusFormat { kM2, kParallel };

struct CorpusEntry {
  std::string name;
  CorpusFormat format = CorpusFormat::kM2;
  std::filesystem::path path;                          // m2 annotation file
  std::filesystem::path source_path;                   // parallel source file
  std::vector<std::filesystem::path> reference_paths;  // parallel references
  CorpusMetadata metadata;
};

struct RunEntry {
  int id = 0;
  std::map<std::string, std::filesystem::path> hypotheses;  // corpus name -> file
};

struct SystemEntry {
  std::string name;
  std::vector<RunEntry> runs;
};

struct MetricParams {
  double beta = 0.5;
  int max_unchanged_words = 2;
  bool case_insensitive = false;
  int order = 4;
  int iterations = 500;
  std::uint64_t seed = kDefaultGleuSeed;
  bool smoothing = false;
  RefPolicy ref_policy = RefPolicy::kFirst;
};

// One evaluation campaign: which corpora, which system outputs, which metrics,
// under which shared parameters. Loaded from a JSON file; relative paths are
// resolved against the manifest's directory and must exist at load time.
struct RunManifest {
  std::vector<CorpusEntry> corpora;
  std::vector<SystemEntry> systems;
  bool want_f_beta = false;
  bool want_gleu = false;
  bool want_wer = false;
  MetricParams params;
  std::filesystem::path base_dir;
};

namespace detail {

using Json = nlohmann::json;

inline ValidationError manifest_error(const std::string& msg) {
  return ValidationError("manifest: " + msg);
}

inline const Json& require(const Json& obj, const char* key,
                           const std::string& where) {
  if (!obj.is_object() || !obj.contains(key))
    throw manifest_error(where + " is missing \"" + key + "\"");
  return obj.at(key);
}

inline std::string require_string(const Json& obj, const char* key,
                                  const std::string& where) {
  const Json& v = require(obj, key, where);
  if (!v.is_string())
    throw manifest_error(where + " \"" + key + "\" must be a string");
  return v.get<std::string>();
}

inline std::filesystem::path resolve(const std::filesystem::path& base,
                                     const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

inline void require_file(const std::filesystem::path& p,
                         const std::string& where) {
  if (!std::filesystem::is_regular_file(p))
    throw manifest_error(where + " refers to missing file " + p.string());
}

inline CorpusMetadata parse_metadata(const Json& entry) {
  CorpusMetadata md;
  if (!entry.contains("metadata")) return md;
  const Json& m = entry.at("metadata");
  if (!m.is_object()) throw manifest_error("\"metadata\" must be an object");
  if (m.contains("topics")) {
    const Json& t = m.at("topics");
    if (t.is_string())
      md.topics = t.get<std::string>();
    else if (t.is_number_integer())
      md.topics = std::to_string(t.get<long long>());
    else
      throw manifest_error("\"topics\" must be a string or integer");
  }
  if (m.contains("multiple_l1")) {
    if (!m.at("multiple_l1").is_boolean())
      throw manifest_error("\"multiple_l1\" must be a boolean");
    md.multiple_l1 = m.at("multiple_l1").get<bool>();
  }
  if (m.contains("multiple_proficiency")) {
    if (!m.at("multiple_proficiency").is_boolean())
      throw manifest_error("\"multiple_proficiency\" must be a boolean");
    md.multiple_proficiency = m.at("multiple_proficiency").get<bool>();
  }
  return md;
}

inline void parse_params(const Json& doc, MetricParams& params) {
  if (!doc.contains("parameters")) return;
  const Json& p = doc.at("parameters");
  if (!p.is_object()) throw manifest_error("\"parameters\" must be an object");
  auto number = [&](const char* key, double lo, double hi) {
    const Json& v = p.at(key);
    if (!v.is_number())
      throw manifest_error(std::string("parameter \"") + key +
                           "\" must be a number");
    const double d = v.get<double>();
    if (d < lo || d > hi)
      throw manifest_error(std::string("parameter \"") + key +
                           "\" out of range");
    return d;
  };
  if (p.contains("beta")) params.beta = number("beta", 1e-9, 1e9);
  if (p.contains("max_unchanged_words"))
    params.max_unchanged_words =
        static_cast<int>(number("max_unchanged_words", 0, 1000));
  if (p.contains("case_insensitive")) {
    if (!p.at("case_insensitive").is_boolean())
      throw manifest_error("parameter \"case_insensitive\" must be a boolean");
    params.case_insensitive = p.at("case_insensitive").get<bool>();
  }
  if (p.contains("order")) params.order = static_cast<int>(number("order", 1, 9));
  if (p.contains("iterations"))
    params.iterations = static_cast<int>(number("iterations", 1, 1000000));
  if (p.contains("seed")) {
    const Json& v = p.at("seed");
    if (!v.is_number_integer())
      throw manifest_error("parameter \"seed\" must be an integer");
    params.seed = v.get<std::uint64_t>();
  }
  if (p.contains("smoothing")) {
    if (!p.at("smoothing").is_boolean())
      throw manifest_error("parameter \"smoothing\" must be a boolean");
    params.smoothing = p.at("smoothing").get<bool>();
  }
  if (p.contains("ref_policy")) {
    const std::string s = require_string(p, "ref_policy", "parameters");
    const auto policy = parse_ref_policy(s);
    if (!policy)
      throw manifest_error("parameter \"ref_policy\" must be first, min or mean");
    params.ref_policy = *policy;
  }
}

}  // namespace detail

inline RunManifest load_manifest(const std::filesystem::path& file) {
  detail::Json doc;
  try {
    doc = detail::Json::parse(read_text_file(file));
  } catch (const detail::Json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), file.string());
  }
  if (!doc.is_object())
    throw detail::manifest_error("top level must be an object");

  RunManifest manifest;
  manifest.base_dir = file.parent_path();

  const detail::Json& corpora = detail::require(doc, "corpora", "manifest");
  if (!corpora.is_array() || corpora.empty())
    throw detail::manifest_error("no corpora configured");
  std::set<std::string> corpus_names;
  for (const detail::Json& c : corpora) {
    CorpusEntry entry;
    entry.name = detail::require_string(c, "name", "corpus entry");
    if (!corpus_names.insert(entry.name).second)
      throw detail::manifest_error("duplicate corpus name \"" + entry.name + "\"");
    const std::string fmt = detail::require_string(c, "format", "corpus entry");
    const std::string where = "corpus \"" + entry.name + "\"";
    if (fmt == "m2") {
      entry.format = CorpusFormat::kM2;
      entry.path =
          detail::resolve(manifest.base_dir, detail::require_string(c, "path", where));
      detail::require_file(entry.path, where);
    } else if (fmt == "parallel") {
      entry.format = CorpusFormat::kParallel;
      entry.source_path = detail::resolve(manifest.base_dir,
                                          detail::require_string(c, "source", where));
      detail::require_file(entry.source_path, where);
      const detail::Json& refs = detail::require(c, "references", where);
      if (!refs.is_array() || refs.empty())
        throw detail::manifest_error(where + " needs at least one reference file");
      for (const detail::Json& r : refs) {
        if (!r.is_string())
          throw detail::manifest_error(where + " reference paths must be strings");
        entry.reference_paths.push_back(
            detail::resolve(manifest.base_dir, r.get<std::string>()));
        detail::require_file(entry.reference_paths.back(), where);
      }
    } else {
      throw detail::manifest_error(where + " has unknown format \"" + fmt +
                                   "\" (expected m2 or parallel)");
    }
    entry.metadata = detail::parse_metadata(c);
    manifest.corpora.push_back(std::move(entry));
  }

  const detail::Json& systems = detail::require(doc, "systems", "manifest");
  if (!systems.is_array() || systems.empty())
    throw detail::manifest_error("no systems configured");
  std::set<std::string> system_names;
  for (const detail::Json& s : systems) {
    SystemEntry sys;
    sys.name = detail::require_string(s, "name", "system entry");
    if (!system_names.insert(sys.name).second)
      throw detail::manifest_error("duplicate system name \"" + sys.name + "\"");
    const std::string where = "system \"" + sys.name + "\"";
    const detail::Json& runs = detail::require(s, "runs", where);
    if (!runs.is_array() || runs.empty())
      throw detail::manifest_error(where + " has no runs");
    std::set<int> run_ids;
    for (const detail::Json& r : runs) {
      RunEntry run;
      if (!r.contains("id") || !r.at("id").is_number_integer())
        throw detail::manifest_error(where + " run is missing an integer \"id\"");
      run.id = r.at("id").get<int>();
      if (!run_ids.insert(run.id).second)
        throw detail::manifest_error(where + " has duplicate run id " +
                                     std::to_string(run.id));
      const detail::Json& hyp = detail::require(r, "hypotheses", where);
      if (!hyp.is_object())
        throw detail::manifest_error(where + " \"hypotheses\" must map corpus "
                                     "names to files");
      for (const auto& [corpus, path] : hyp.items()) {
        if (!corpus_names.count(corpus))
          throw detail::manifest_error(where + " names unknown corpus \"" +
                                       corpus + "\"");
        if (!path.is_string())
          throw detail::manifest_error(where + " hypothesis paths must be strings");
        run.hypotheses[corpus] =
            detail::resolve(manifest.base_dir, path.get<std::string>());
        detail::require_file(run.hypotheses[corpus], where);
      }
      for (const std::string& corpus : corpus_names)
        if (!run.hypotheses.count(corpus))
          throw detail::manifest_error(where + " run " + std::to_string(run.id) +
                                       " has no hypothesis file for corpus \"" +
                                       corpus + "\"");
      sys.runs.push_back(std::move(run));
    }
    manifest.systems.push_back(std::move(sys));
  }

  const detail::Json& metrics = detail::require(doc, "metrics", "manifest");
  if (!metrics.is_array() || metrics.empty())
    throw detail::manifest_error("no metrics requested");
  for (const detail::Json& m : metrics) {
    if (!m.is_string())
      throw detail::manifest_error("metric names must be strings");
    const std::string name = m.get<std::string>();
    if (name == "f_beta")
      manifest.want_f_beta = true;
    else if (name == "gleu")
      manifest.want_gleu = true;
    else if (name == "wer")
      manifest.want_wer = true;
    else
      throw detail::manifest_error("unknown metric \"" + name +
                                   "\" (expected f_beta, gleu or wer)");
  }
  if (manifest.want_f_beta)
    for (const CorpusEntry& c : manifest.corpora)
      if (c.format == CorpusFormat::kParallel)
        throw detail::manifest_error(
            "metric f_beta needs gold edits, but corpus \"" + c.name +
            "\" is parallel text");

  detail::parse_params(doc, manifest.params);
  return manifest;
}

// A corpus pulled into memory: tokenized sources, per-sentence references,
// and (for annotated corpora) the gold edit sets.
struct LoadedCorpus {
  std::string name;
  bool has_edits = false;
  Corpus corpus;  // gold edits valid only when has_edits
  std::vector<Sentence> sources;
  std::vector<std::vector<Sentence>> references;
  CorpusMetadata metadata;
};

inline LoadedCorpus load_corpus(const CorpusEntry& entry) {
  LoadedCorpus loaded;
  loaded.name = entry.name;
  loaded.metadata = entry.metadata;
  if (entry.format == CorpusFormat::kM2) {
    loaded.has_edits = true;
    const M2Document doc = parse_m2_file(entry.path);
    loaded.corpus.name = entry.name;
    loaded.corpus.metadata = entry.metadata;
    loaded.corpus.sentences = doc.sentences;
    for (const AnnotatedSentence& sent : doc.sentences) {
      loaded.sources.push_back(sent.source);
      loaded.references.push_back(reference_sentences(sent));
    }
    return loaded;
  }
  const std::vector<std::string> src_lines =
      split_lines(read_text_file(entry.source_path));
  for (const std::string& line : src_lines)
    loaded.sources.push_back(tokenize(line));
  loaded.references.resize(loaded.sources.size());
  for (const std::filesystem::path& ref_path : entry.reference_paths) {
    const std::vector<std::string> ref_lines =
        split_lines(read_text_file(ref_path));
    if (ref_lines.size() != src_lines.size())
      throw ValidationError("corpus '" + entry.name + "': reference file " +
                            ref_path.string() + " has " +
                            std::to_string(ref_lines.size()) +
                            " lines but the source file has " +
                            std::to_string(src_lines.size()));
    for (std::size_t i = 0; i < ref_lines.size(); ++i)
      loaded.references[i].push_back(tokenize(ref_lines[i]));
  }
  loaded.corpus.name = entry.name;
  loaded.corpus.metadata = entry.metadata;
  for (const Sentence& s : loaded.sources)
    loaded.corpus.sentences.push_back(AnnotatedSentence{s, {}});
  return loaded;
}

inline std::vector<Sentence> load_hypotheses(const std::filesystem::path& file,
                                             std::size_t expected,
                                             const std::string& context) {
  const std::vector<std::string> lines = split_lines(read_text_file(file));
  if (lines.size() != expected)
    throw ScoringError(context + ": hypothesis file " + file.string() + " has " +
                       std::to_string(lines.size()) + " lines but " +
                       std::to_string(expected) + " sentences are expected");
  std::vector<Sentence> out;
  out.reserve(lines.size());
  for (const std::string& line : lines) out.push_back(tokenize(line));
  return out;
}

}  // namespace gecval

#endif  // GECVAL_MANIFEST_HPP
