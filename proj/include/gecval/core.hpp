#ifndef GECVAL_CORE_HPP
#define GECVAL_CORE_HPP

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gecval/error.hpp"

namespace gecval {

// Tokens are pre-tokenized words; no linguistic tokenization happens anywhere
// in this library. A token is a non-empty string with no internal whitespace.
using Token = std::string;
using Sentence = std::vector<Token>;

constexpr int kNoAnnotator = -1;

// A span replacement on a tokenized sentence. [start, end) are 0-based token
// offsets into the source; start == end is a pure insertion before `start`.
// An empty replacement is a deletion. `required` and `comment` are carried
// through from annotation files verbatim; scoring ignores them.
//
// An annotation line may offer several acceptable rewrites for one span
// ("her||his"). `replacement` is the first one; the rest live in
// `alternatives`. Applying an edit always uses `replacement`; matching
// accepts any of them.
struct Edit {
  int start = 0;
  int end = 0;
  Sentence replacement;
  std::string error_type = "UNK";
  int annotator_id = kNoAnnotator;
  std::string required = "REQUIRED";
  std::string comment = "-NONE-";
  std::vector<Sentence> alternatives;

  bool is_insertion() const { return start == end; }

  // Equality of the correction itself (span + primary replacement). Alternative
  // rewrites and metadata do not participate.
  bool same_correction(const Edit& other) const {
    return start == other.start && end == other.end &&
           replacement == other.replacement;
  }

  friend bool operator==(const Edit& a, const Edit& b) {
    return a.start == b.start && a.end == b.end &&
           a.replacement == b.replacement && a.error_type == b.error_type &&
           a.annotator_id == b.annotator_id && a.required == b.required &&
           a.comment == b.comment && a.alternatives == b.alternatives;
  }
};

inline bool edit_span_less(const Edit& a, const Edit& b) {
  if (a.start != b.start) return a.start < b.start;
  if (a.end != b.end) return a.end < b.end;
  return a.replacement < b.replacement;
}

// One source sentence plus per-annotator gold edit sets. An annotator present
// with an empty vector marked the sentence as already correct; an annotator
// absent from the map made no judgement on this sentence.
struct AnnotatedSentence {
  Sentence source;
  std::map<int, std::vector<Edit>> gold;
};

struct CorpusMetadata {
  std::string topics = "-";  // Verbatim ("2", "10", "Many", ...).
  bool multiple_l1 = false;
  bool multiple_proficiency = false;
};

struct Corpus {
  std::string name;
  std::vector<AnnotatedSentence> sentences;
  CorpusMetadata metadata;
};

// One system's corrected output for an entire corpus, one sentence per source
// sentence. run_id distinguishes retrainings of the same system.
struct HypothesisSet {
  std::string system_name;
  int run_id = 0;
  std::vector<Sentence> sentences;
};

inline Sentence tokenize(std::string_view line) {
  Sentence tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) tokens.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

inline std::string join(const Sentence& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

inline std::string describe_edit(const Edit& e) {
  return "(" + std::to_string(e.start) + "," + std::to_string(e.end) + ",\"" +
         join(e.replacement) + "\")";
}

// Checks bounds and pairwise non-overlap for one annotator's edit set over a
// sentence of `length` tokens. By default two pure insertions at the same
// index count as overlapping; extracted system edits may legitimately stack
// insertions at one index, so callers handling those pass
// allow_stacked_insertions. Throws ValidationError naming the offending edit
// or pair.
inline void validate_edits(std::size_t length, const std::vector<Edit>& edits,
                           const std::string& context = "",
                           bool allow_stacked_insertions = false) {
  const std::string where = context.empty() ? "" : context + ": ";
  for (const Edit& e : edits) {
    if (e.start < 0 || e.end < e.start ||
        static_cast<std::size_t>(e.end) > length) {
      throw ValidationError(where + "edit " + describe_edit(e) +
                            " is out of bounds for a sentence of " +
                            std::to_string(length) + " tokens");
    }
  }
  std::vector<const Edit*> sorted;
  sorted.reserve(edits.size());
  for (const Edit& e : edits) sorted.push_back(&e);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Edit* a, const Edit* b) {
                     if (a->start != b->start) return a->start < b->start;
                     return a->end < b->end;
                   });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const Edit& prev = *sorted[i - 1];
    const Edit& cur = *sorted[i];
    const bool stacked_insertions =
        prev.is_insertion() && cur.is_insertion() && prev.start == cur.start;
    if (cur.start < prev.end ||
        (stacked_insertions && !allow_stacked_insertions)) {
      throw ValidationError(where + "edits " + describe_edit(prev) + " and " +
                            describe_edit(cur) + " overlap");
    }
  }
}

// Applies a non-overlapping edit set to a sentence. Edits are applied
// right-to-left so the stored offsets stay valid while splicing. Insertions
// stacked at one index splice in listed order.
inline Sentence apply_edits(const Sentence& source, std::vector<Edit> edits) {
  validate_edits(source.size(), edits, "", /*allow_stacked_insertions=*/true);
  std::stable_sort(edits.begin(), edits.end(), [](const Edit& a, const Edit& b) {
    if (a.start != b.start) return a.start < b.start;
    return a.end < b.end;
  });
  Sentence result = source;
  for (auto it = edits.rbegin(); it != edits.rend(); ++it) {
    result.erase(result.begin() + it->start, result.begin() + it->end);
    result.insert(result.begin() + it->start, it->replacement.begin(),
                  it->replacement.end());
  }
  return result;
}

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace gecval

#endif  // GECVAL_CORE_HPP
