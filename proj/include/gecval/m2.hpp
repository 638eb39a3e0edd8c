#ifndef GECVAL_M2_HPP
#define GECVAL_M2_HPP

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "gecval/core.hpp"
#include "gecval/error.hpp"
#include "gecval/io.hpp"

namespace gecval {

// An M2 annotation file: blocks of one "S" source line plus zero or more "A"
// edit lines, separated by blank lines.
struct M2Document {
  std::vector<AnnotatedSentence> sentences;
};

namespace detail {

inline bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

inline int parse_int_field(std::string_view text, const std::string& file,
                           long line_no, const char* what) {
  int value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ParseError(std::string("expected integer ") + what + ", got '" +
                         std::string(text) + "'",
                     file, line_no);
  return value;
}

inline std::vector<std::string_view> split_fields(std::string_view body) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t sep = body.find("|||", start);
    if (sep == std::string_view::npos) {
      fields.push_back(body.substr(start));
      break;
    }
    fields.push_back(body.substr(start, sep - start));
    start = sep + 3;
  }
  return fields;
}

inline std::string_view trim(std::string_view s) {
  const std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string_view::npos) return {};
  const std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

// The correction field may list alternatives separated by "||". "-NONE-" or an
// empty segment means deletion.
inline std::vector<Sentence> parse_correction_field(std::string_view field) {
  std::vector<Sentence> options;
  std::size_t start = 0;
  while (true) {
    const std::size_t sep = field.find("||", start);
    const std::string_view raw = sep == std::string_view::npos
                                     ? field.substr(start)
                                     : field.substr(start, sep - start);
    const std::string_view seg = trim(raw);
    if (seg == "-NONE-" || seg.empty())
      options.emplace_back();
    else
      options.push_back(tokenize(seg));
    if (sep == std::string_view::npos) break;
    start = sep + 2;
  }
  return options;
}

}  // namespace detail

// Parses M2 text. Every structural problem raises ParseError with the line
// number; edits that violate the span invariants raise ValidationError. No
// annotation is ever dropped silently.
inline M2Document parse_m2(std::string_view text, const std::string& file = "") {
  M2Document doc;
  const std::vector<std::string> lines = split_lines(text);

  AnnotatedSentence current;
  bool in_block = false;
  long block_line = 0;

  auto flush = [&](long end_line) {
    if (!in_block) return;
    if (current.gold.empty()) current.gold[0] = {};  // unannotated block
    for (const auto& [annotator, edits] : current.gold) {
      try {
        validate_edits(current.source.size(), edits,
                       "sentence " + std::to_string(doc.sentences.size() + 1) +
                           ", annotator " + std::to_string(annotator));
      } catch (const ValidationError& e) {
        throw ValidationError((file.empty() ? std::string() : file + ": ") +
                              e.what());
      }
    }
    (void)end_line;
    doc.sentences.push_back(std::move(current));
    current = {};
    in_block = false;
  };

  for (std::size_t idx = 0; idx < lines.size(); ++idx) {
    const std::string& line = lines[idx];
    const long line_no = static_cast<long>(idx) + 1;
    if (detail::is_blank(line)) {
      flush(line_no);
      continue;
    }
    if (line.rfind("S ", 0) == 0 || line == "S") {
      if (in_block)
        throw ParseError("second source line in one block (block starts at line " +
                             std::to_string(block_line) + ")",
                         file, line_no);
      in_block = true;
      block_line = line_no;
      current.source = tokenize(std::string_view(line).substr(1));
      continue;
    }
    if (line.rfind("A ", 0) == 0) {
      if (!in_block)
        throw ParseError("annotation line before any source line", file, line_no);
      const std::vector<std::string_view> fields =
          detail::split_fields(std::string_view(line).substr(2));
      if (fields.size() != 6)
        throw ParseError("expected 6 '|||'-separated fields, got " +
                             std::to_string(fields.size()),
                         file, line_no);
      const Sentence offsets = tokenize(fields[0]);
      if (offsets.size() != 2)
        throw ParseError("expected 'start end' offsets, got '" +
                             std::string(fields[0]) + "'",
                         file, line_no);
      const int start = detail::parse_int_field(offsets[0], file, line_no, "start offset");
      const int end = detail::parse_int_field(offsets[1], file, line_no, "end offset");
      const std::string etype(fields[1]);
      const int annotator = detail::parse_int_field(fields[5], file, line_no, "annotator id");
      if (annotator < 0)
        throw ParseError("negative annotator id", file, line_no);

      if (etype == "noop" || (start == -1 && end == -1)) {
        current.gold.try_emplace(annotator);  // present, possibly empty
        continue;
      }

      Edit edit;
      edit.start = start;
      edit.end = end;
      edit.error_type = etype;
      edit.annotator_id = annotator;
      edit.required = std::string(fields[3]);
      edit.comment = std::string(fields[4]);
      std::vector<Sentence> options = detail::parse_correction_field(fields[2]);
      edit.replacement = std::move(options.front());
      edit.alternatives.assign(std::make_move_iterator(options.begin() + 1),
                               std::make_move_iterator(options.end()));
      current.gold[annotator].push_back(std::move(edit));
      continue;
    }
    throw ParseError("unrecognized line prefix (expected 'S ', 'A ' or blank)",
                     file, line_no);
  }
  flush(static_cast<long>(lines.size()) + 1);
  return doc;
}

inline M2Document parse_m2_file(const std::filesystem::path& path) {
  return parse_m2(read_text_file(path), path.string());
}

// Lenient full-file check: walks the same grammar as parse_m2 but keeps going
// after a problem, collecting one located diagnostic per violation. An empty
// result means parse_m2 accepts the file.
inline std::vector<std::string> validate_m2_text(std::string_view text,
                                                 const std::string& file = "") {
  std::vector<std::string> problems;
  const std::vector<std::string> lines = split_lines(text);

  AnnotatedSentence current;
  bool in_block = false;
  long block_line = 0;
  std::size_t sentence_no = 0;
  std::map<int, long> annotator_line;  // first A line per annotator

  auto locate = [&](const std::string& message, long line_no) {
    problems.push_back(ParseError(message, file, line_no).what());
  };

  auto flush = [&] {
    if (!in_block) return;
    ++sentence_no;
    if (current.gold.empty()) current.gold[0] = {};
    for (const auto& [annotator, edits] : current.gold) {
      try {
        validate_edits(current.source.size(), edits,
                       "sentence " + std::to_string(sentence_no) +
                           ", annotator " + std::to_string(annotator));
      } catch (const ValidationError& e) {
        const auto at = annotator_line.find(annotator);
        locate(e.what(), at == annotator_line.end() ? block_line : at->second);
      }
    }
    current = {};
    annotator_line.clear();
    in_block = false;
  };

  for (std::size_t idx = 0; idx < lines.size(); ++idx) {
    const std::string& line = lines[idx];
    const long line_no = static_cast<long>(idx) + 1;
    if (detail::is_blank(line)) {
      flush();
      continue;
    }
    if (line.rfind("S ", 0) == 0 || line == "S") {
      if (in_block) {
        locate("second source line in one block (block starts at line " +
                   std::to_string(block_line) + ")",
               line_no);
        flush();  // treat it as a new block so later lines stay checkable
      }
      in_block = true;
      block_line = line_no;
      current.source = tokenize(std::string_view(line).substr(1));
      continue;
    }
    if (line.rfind("A ", 0) == 0) {
      if (!in_block) {
        locate("annotation line before any source line", line_no);
        continue;
      }
      const std::vector<std::string_view> fields =
          detail::split_fields(std::string_view(line).substr(2));
      if (fields.size() != 6) {
        locate("expected 6 '|||'-separated fields, got " +
                   std::to_string(fields.size()),
               line_no);
        continue;
      }
      try {
        const Sentence offsets = tokenize(fields[0]);
        if (offsets.size() != 2)
          throw ParseError("expected 'start end' offsets, got '" +
                               std::string(fields[0]) + "'",
                           file, line_no);
        const int start =
            detail::parse_int_field(offsets[0], file, line_no, "start offset");
        const int end =
            detail::parse_int_field(offsets[1], file, line_no, "end offset");
        const std::string etype(fields[1]);
        const int annotator =
            detail::parse_int_field(fields[5], file, line_no, "annotator id");
        if (annotator < 0)
          throw ParseError("negative annotator id", file, line_no);
        if (etype == "noop" || (start == -1 && end == -1)) {
          current.gold.try_emplace(annotator);
          annotator_line.try_emplace(annotator, line_no);
          continue;
        }
        Edit edit;
        edit.start = start;
        edit.end = end;
        edit.error_type = etype;
        edit.annotator_id = annotator;
        edit.required = std::string(fields[3]);
        edit.comment = std::string(fields[4]);
        std::vector<Sentence> options =
            detail::parse_correction_field(fields[2]);
        edit.replacement = std::move(options.front());
        edit.alternatives.assign(std::make_move_iterator(options.begin() + 1),
                                 std::make_move_iterator(options.end()));
        annotator_line.try_emplace(annotator, line_no);
        current.gold[annotator].push_back(std::move(edit));
      } catch (const ParseError& e) {
        problems.push_back(e.what());
      }
      continue;
    }
    locate("unrecognized line prefix (expected 'S ', 'A ' or blank)", line_no);
  }
  flush();
  return problems;
}

/// Serializes canonically: annotators ascending, edits in span order, LF line
// endings, deletions written as -NONE-, alternatives joined with "||", empty
// edit sets written as noop lines. parse_m2(serialize_m2(doc)) is
// structurally identical to doc.
inline std::string serialize_m2(const M2Document& doc) {
  std::string out;
  for (const AnnotatedSentence& sent : doc.sentences) {
    out += "S " + join(sent.source) + "\n";
    for (const auto& [annotator, edits] : sent.gold) {
      if (edits.empty()) {
        out += "A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||" +
               std::to_string(annotator) + "\n";
        continue;
      }
      std::vector<Edit> sorted = edits;
      std::sort(sorted.begin(), sorted.end(), edit_span_less);
      for (const Edit& e : sorted) {
        std::string correction =
            e.replacement.empty() ? "-NONE-" : join(e.replacement);
        for (const Sentence& alt : e.alternatives)
          correction += "||" + (alt.empty() ? "-NONE-" : join(alt));
        out += "A " + std::to_string(e.start) + " " + std::to_string(e.end) +
               "|||" + e.error_type + "|||" + correction + "|||" + e.required +
               "|||" + e.comment + "|||" + std::to_string(annotator) + "\n";
      }
    }
    out += "\n";
  }
  return out;
}

enum class AnnotatorPolicy { kAll, kFirst };

// Plain-text projection of an annotated corpus: one source line per sentence
// and one reference file per annotator id.
struct ParallelText {
  std::vector<std::string> sources;
  std::vector<int> annotator_ids;                    // one per reference file
  std::vector<std::vector<std::string>> references;  // [file][sentence]
};

inline ParallelText to_parallel(const M2Document& doc,
                                AnnotatorPolicy policy = AnnotatorPolicy::kAll) {
  ParallelText out;
  std::set<int> ids;
  for (const AnnotatedSentence& sent : doc.sentences)
    for (const auto& [annotator, edits] : sent.gold) ids.insert(annotator);
  if (policy == AnnotatorPolicy::kFirst && !ids.empty())
    ids = {*ids.begin()};
  out.annotator_ids.assign(ids.begin(), ids.end());
  out.references.resize(out.annotator_ids.size());

  for (const AnnotatedSentence& sent : doc.sentences) {
    out.sources.push_back(join(sent.source));
    for (std::size_t k = 0; k < out.annotator_ids.size(); ++k) {
      auto it = sent.gold.find(out.annotator_ids[k]);
      // A sentence this annotator never saw falls back to the lowest
      // available annotator's reference, or to the source itself.
      if (it == sent.gold.end()) it = sent.gold.begin();
      out.references[k].push_back(
          it == sent.gold.end() ? join(sent.source)
                                : join(apply_edits(sent.source, it->second)));
    }
  }
  return out;
}

// Materializes every reference of a sentence, ordered by annotator id.
inline std::vector<Sentence> reference_sentences(const AnnotatedSentence& sent) {
  std::vector<Sentence> refs;
  refs.reserve(sent.gold.size());
  for (const auto& [annotator, edits] : sent.gold)
    refs.push_back(apply_edits(sent.source, edits));
  return refs;
}

}  // namespace gecval

#endif  // GECVAL_M2_HPP
