#ifndef GECVAL_MAXMATCH_HPP
#define GECVAL_MAXMATCH_HPP

#include <algorithm>
#include <climits>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "gecval/core.hpp"
#include "gecval/error.hpp"
#include "gecval/parallel.hpp"

namespace gecval {

struct MatchParams {
  int max_unchanged_words = 2;
  bool case_insensitive = false;
  double beta = 0.5;
};

struct MatchCounts {
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;

  MatchCounts& operator+=(const MatchCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const MatchCounts&, const MatchCounts&) = default;
};

// (1+b^2)*tp / (b^2*(tp+fn) + (tp+fp)) equals (1+b^2)PR/(b^2*P+R) wherever the
// latter is defined and extends it with the 0/0 -> 0 convention.
inline double f_beta(long long tp, long long fp, long long fn, double beta = 0.5) {
  if (tp < 0 || fp < 0 || fn < 0)
    throw ValidationError("f_beta: counts must be non-negative");
  if (beta < 0.0) throw ValidationError("f_beta: beta must be non-negative");
  const double den = beta * beta * static_cast<double>(tp + fn) +
                     static_cast<double>(tp + fp);
  if (den == 0.0) return 0.0;
  return (1.0 + beta * beta) * static_cast<double>(tp) / den;
}

inline double f_beta(const MatchCounts& c, double beta = 0.5) {
  return f_beta(c.tp, c.fp, c.fn, beta);
}

// F from already-computed precision and recall, same 0/0 -> 0 convention.
// Useful when only published P/R figures are available, not raw counts.
inline double f_beta_pr(double p, double r, double beta = 0.5) {
  if (p < 0.0 || r < 0.0 || beta < 0.0)
    throw ValidationError("f_beta_pr: arguments must be non-negative");
  const double den = beta * beta * p + r;
  if (den == 0.0) return 0.0;
  return (1.0 + beta * beta) * p * r / den;
}

inline double precision(const MatchCounts& c) {
  return c.tp + c.fp == 0 ? 0.0 : static_cast<double>(c.tp) / (c.tp + c.fp);
}

inline double recall(const MatchCounts& c) {
  return c.tp + c.fn == 0 ? 0.0 : static_cast<double>(c.tp) / (c.tp + c.fn);
}

// Matches one (source, hypothesis) pair against gold edit sets.
//
// Candidate edits live on a word alignment lattice: take the union, over two
// cost schemes (substitution cost 1 and 2; insertion and deletion always 1),
// of every locally minimal alignment move, then drop cells that lie on no
// complete source-to-hypothesis path. A system edit is a lattice subpath
// rewriting source[i..p) into hypothesis[j..q) that keeps at most
// max_unchanged_words tokens unchanged along the way, and an edit sequence is
// any chaining of such subpaths, joined by unchanged moves, that spans a
// complete path. Per gold set the matcher picks the sequence with
//   1. the most edits equal to a gold edit (span plus any listed rewrite),
//   2. the fewest alignment moves outside matched edits,
//   3. the fewest unmatched edits,
//   4. the lexicographically smallest edits by (start, end, replacement).
// A gold insertion is credited at most once among insertions at its index.
// Counting this way reproduces the usual MaxMatch scorer, whose weighted
// shortest path optimizes exactly 1-3 and leaves 4 unspecified.
class SentenceMatcher {
 public:
  SentenceMatcher(const Sentence& source, const Sentence& hypothesis,
                  const MatchParams& params = {})
      : params_(params), src_raw_(source), hyp_raw_(hypothesis) {
    if (params.max_unchanged_words < 0)
      throw ValidationError("max_unchanged_words must be non-negative");
    if (!(params.beta >= 0.0))
      throw ValidationError("beta must be non-negative");
    n_ = static_cast<int>(source.size());
    m_ = static_cast<int>(hypothesis.size());
    // Both bounds keep kB * path_length < kA, so packed values stay ordered.
    if (static_cast<long long>(n_ + 1) * (m_ + 1) > kMaxCells ||
        n_ + m_ >= (1 << 19))
      throw ScoringError("sentence pair too large to align (" +
                         std::to_string(n_) + " x " + std::to_string(m_) +
                         " tokens)");
    src_ = fold(source);
    hyp_ = fold(hypothesis);
    nc_ = (n_ + 1) * (m_ + 1);
    build_lattice();
  }

  // tp/fp/fn of the best edit sequence against one annotator's gold edits.
  MatchCounts counts(const std::vector<Edit>& gold) {
    const int64_t v = solve(gold);
    const int64_t matches = (v + kA - 1) / kA;
    const int64_t penalty = kA * matches - v;
    MatchCounts c;
    c.tp = matches;
    c.fp = penalty % kB;  // unmatched edits
    c.fn = static_cast<long long>(gold.size()) - matches;
    return c;
  }

  // The best edit sequence itself, in source order. Applying it to the source
  // reproduces the hypothesis; matched edits carry the gold span with the
  // hypothesis tokens as replacement.
  std::vector<Edit> best_edits(const std::vector<Edit>& gold) {
    solve(gold);
    std::vector<Edit> edits;
    int i = 0, j = 0, bit = 0;
    while (!(i == n_ && j == m_)) {
      const int64_t v = vout_[at(i, j) * 2 + bit];
      bool found = false;
      Edit pick;
      int pick_i = 0, pick_j = 0, pick_bit = 0;
      auto consider = [&](Edit e, int di, int dj, int nbit) {
        if (found && !(std::make_pair(e.end, std::cref(e.replacement)) <
                       std::make_pair(pick.end, std::cref(pick.replacement))))
          return;
        found = true;
        pick = std::move(e);
        pick_i = di;
        pick_j = dj;
        pick_bit = nbit;
      };
      for (const Jump& jp : jumps_[at(i, j)]) {
        if (jp.ins && bit) continue;
        const int nbit = jp.ins ? 1 : 0;
        const int64_t dv = vout_[at(jp.di, jp.dj) * 2 + nbit];
        if (dv == kNone || dv + kA != v) continue;
        consider(make_edit(i, jp.di, j, jp.dj), jp.di, jp.dj, nbit);
      }
      for (int p = i; p <= n_; ++p) {
        for (int q = j; q <= m_; ++q) {
          if (p == i && q == j) continue;
          if (!alive_[at(p, q)]) continue;
          const int nbit = p == i ? bit : 0;
          const int64_t dv = vout_[at(p, q) * 2 + nbit];
          if (dv == kNone) continue;
          const int64_t need = dv - 1 - v;
          if (need < 0 || need % kB != 0) continue;
          const int64_t edges = need / kB;
          if (edges < 1 || edges < std::max(p - i, q - j) ||
              edges > (p - i) + (q - j))
            continue;
          if (!subpath_exact(i, j, p, q, static_cast<int>(edges))) continue;
          consider(make_edit(i, p, j, q), p, q, nbit);
        }
      }
      if (found) {
        edits.push_back(std::move(pick));
        i = pick_i;
        j = pick_j;
        bit = pick_bit;
        continue;
      }
      if (i < n_ && j < m_ && (in_[at(i + 1, j + 1)] & kDiag) &&
          src_[i] == hyp_[j]) {
        const int64_t dv = vout_[at(i + 1, j + 1) * 2];
        if (dv != kNone && dv - kB == v) {
          ++i;
          ++j;
          bit = 0;
          continue;
        }
      }
      throw ScoringError("edit extraction lost the optimal path");
    }
    return edits;
  }

 private:
  // Inbound alignment moves per cell.
  enum : unsigned char { kDiag = 1, kDel = 2, kIns = 4 };

  struct Jump {
    int di, dj;  // cell after the matched edit
    bool ins;
  };

  static constexpr long long kMaxCells = 1LL << 20;
  static constexpr int64_t kA = INT64_C(1) << 40;  // one gold match
  static constexpr int64_t kB = INT64_C(1) << 20;  // one move outside matches
  static constexpr int64_t kNone = std::numeric_limits<int64_t>::min();

  int at(int i, int j) const { return i * (m_ + 1) + j; }

  Sentence fold(const Sentence& s) const {
    if (!params_.case_insensitive) return s;
    Sentence out;
    out.reserve(s.size());
    for (const Token& t : s) out.push_back(ascii_lower(t));
    return out;
  }

  Edit make_edit(int i, int p, int j, int q) const {
    Edit e;
    e.start = i;
    e.end = p;
    e.replacement.assign(hyp_raw_.begin() + j, hyp_raw_.begin() + q);
    return e;
  }

  void build_lattice() {
    in_.assign(nc_, 0);
    for (const int sub_cost : {1, 2}) {
      std::vector<int> d(nc_, 0);
      for (int i = 1; i <= n_; ++i) {
        d[at(i, 0)] = i;
        in_[at(i, 0)] |= kDel;
      }
      for (int j = 1; j <= m_; ++j) {
        d[at(0, j)] = j;
        in_[at(0, j)] |= kIns;
      }
      for (int i = 1; i <= n_; ++i) {
        for (int j = 1; j <= m_; ++j) {
          const int diagc =
              d[at(i - 1, j - 1)] + (src_[i - 1] == hyp_[j - 1] ? 0 : sub_cost);
          const int delc = d[at(i - 1, j)] + 1;
          const int insc = d[at(i, j - 1)] + 1;
          const int best = std::min(diagc, std::min(delc, insc));
          d[at(i, j)] = best;
          if (diagc == best) in_[at(i, j)] |= kDiag;
          if (delc == best) in_[at(i, j)] |= kDel;
          if (insc == best) in_[at(i, j)] |= kIns;
        }
      }
    }
    // Keep only cells on some complete path; moves into or out of dropped
    // cells go with them.
    std::vector<char> rf(nc_, 0), rb(nc_, 0);
    rf[0] = 1;
    for (int i = 0; i <= n_; ++i)
      for (int j = 0; j <= m_; ++j) {
        if (i == 0 && j == 0) continue;
        const unsigned char e = in_[at(i, j)];
        char r = 0;
        if ((e & kDiag) && rf[at(i - 1, j - 1)]) r = 1;
        if ((e & kDel) && rf[at(i - 1, j)]) r = 1;
        if ((e & kIns) && rf[at(i, j - 1)]) r = 1;
        rf[at(i, j)] = r;
      }
    rb[at(n_, m_)] = 1;
    for (int i = n_; i >= 0; --i)
      for (int j = m_; j >= 0; --j) {
        if (i == n_ && j == m_) continue;
        char r = 0;
        if (i < n_ && j < m_ && (in_[at(i + 1, j + 1)] & kDiag) &&
            rb[at(i + 1, j + 1)])
          r = 1;
        if (i < n_ && (in_[at(i + 1, j)] & kDel) && rb[at(i + 1, j)]) r = 1;
        if (j < m_ && (in_[at(i, j + 1)] & kIns) && rb[at(i, j + 1)]) r = 1;
        rb[at(i, j)] = r;
      }
    alive_.assign(nc_, 0);
    for (int c = 0; c < nc_; ++c) alive_[c] = rf[c] && rb[c];
    for (int i = 0; i <= n_; ++i)
      for (int j = 0; j <= m_; ++j) {
        unsigned char& e = in_[at(i, j)];
        if (!alive_[at(i, j)]) {
          e = 0;
          continue;
        }
        if ((e & kDiag) && !alive_[at(i - 1, j - 1)]) e &= ~kDiag;
        if ((e & kDel) && !alive_[at(i - 1, j)]) e &= ~kDel;
        if ((e & kIns) && !alive_[at(i, j - 1)]) e &= ~kIns;
      }
  }

  // Minimum unchanged moves over subpaths (r0,c0) -> (r1,c1), or INT_MAX.
  int min_noops(int r0, int c0, int r1, int c1) const {
    const int w = c1 - c0 + 1;
    std::vector<int> f(static_cast<std::size_t>(r1 - r0 + 1) * w, INT_MAX);
    f[0] = 0;
    for (int r = r0; r <= r1; ++r)
      for (int c = c0; c <= c1; ++c) {
        if (r == r0 && c == c0) continue;
        const unsigned char e = in_[at(r, c)];
        int best = INT_MAX;
        if (r > r0 && c > c0 && (e & kDiag)) {
          const int prev = f[(r - 1 - r0) * w + (c - 1 - c0)];
          if (prev != INT_MAX)
            best = std::min(best, prev + (src_[r - 1] == hyp_[c - 1] ? 1 : 0));
        }
        if (r > r0 && (e & kDel)) {
          const int prev = f[(r - 1 - r0) * w + (c - c0)];
          if (prev != INT_MAX) best = std::min(best, prev);
        }
        if (c > c0 && (e & kIns)) {
          const int prev = f[(r - r0) * w + (c - 1 - c0)];
          if (prev != INT_MAX) best = std::min(best, prev);
        }
        f[(r - r0) * w + (c - c0)] = best;
      }
    return f.back();
  }

  // Whether some subpath (r0,c0) -> (r1,c1) uses exactly `edges` moves with at
  // most max_unchanged_words unchanged ones.
  bool subpath_exact(int r0, int c0, int r1, int c1, int edges) const {
    const int w = c1 - c0 + 1;
    const int steps = edges + 1;
    std::vector<int> f(static_cast<std::size_t>(r1 - r0 + 1) * w * steps,
                      INT_MAX);
    auto fx = [&](int r, int c, int e) -> int& {
      return f[(static_cast<std::size_t>(r - r0) * w + (c - c0)) * steps + e];
    };
    fx(r0, c0, 0) = 0;
    for (int r = r0; r <= r1; ++r)
      for (int c = c0; c <= c1; ++c) {
        if (r == r0 && c == c0) continue;
        const unsigned char e = in_[at(r, c)];
        for (int k = 1; k < steps; ++k) {
          int best = INT_MAX;
          if (r > r0 && c > c0 && (e & kDiag)) {
            const int prev = fx(r - 1, c - 1, k - 1);
            if (prev != INT_MAX)
              best =
                  std::min(best, prev + (src_[r - 1] == hyp_[c - 1] ? 1 : 0));
          }
          if (r > r0 && (e & kDel)) {
            const int prev = fx(r - 1, c, k - 1);
            if (prev != INT_MAX) best = std::min(best, prev);
          }
          if (c > c0 && (e & kIns)) {
            const int prev = fx(r, c - 1, k - 1);
            if (prev != INT_MAX) best = std::min(best, prev);
          }
          fx(r, c, k) = best;
        }
      }
    return fx(r1, c1, edges) <= params_.max_unchanged_words;
  }

  void build_jumps(const std::vector<Edit>& gold) {
    jumps_.assign(nc_, {});
    for (const Edit& g : gold) {
      if (g.start < 0 || g.end < g.start || g.end > n_)
        throw ValidationError("gold edit " + describe_edit(g) +
                              " is out of bounds for a sentence of " +
                              std::to_string(n_) + " tokens");
      std::vector<Sentence> alts;
      alts.push_back(fold(g.replacement));
      for (const Sentence& a : g.alternatives) {
        Sentence fa = fold(a);
        if (std::find(alts.begin(), alts.end(), fa) == alts.end())
          alts.push_back(std::move(fa));
      }
      const bool ins = g.start == g.end;
      for (const Sentence& alt : alts) {
        const int L = static_cast<int>(alt.size());
        if (L == g.end - g.start &&
            std::equal(alt.begin(), alt.end(), src_.begin() + g.start))
          continue;  // no change; never an edit
        for (int j0 = 0; j0 + L <= m_; ++j0) {
          if (!std::equal(alt.begin(), alt.end(), hyp_.begin() + j0)) continue;
          if (!alive_[at(g.start, j0)] || !alive_[at(g.end, j0 + L)]) continue;
          if (min_noops(g.start, j0, g.end, j0 + L) >
              params_.max_unchanged_words)
            continue;
          jumps_[at(g.start, j0)].push_back(Jump{g.end, j0 + L, ins});
        }
      }
    }
  }

  // Backward best-completion values. vout_: between edits; vin_: inside an
  // unmatched edit, grouped by unchanged moves used so far. The spare bit
  // records whether an insertion gold was already credited at the current
  // source index.
  int64_t solve(const std::vector<Edit>& gold) {
    build_jumps(gold);
    const int cap = params_.max_unchanged_words;
    const int groups = cap + 1;
    vout_.assign(static_cast<std::size_t>(nc_) * 2, kNone);
    vin_.assign(static_cast<std::size_t>(nc_) * groups * 2, kNone);
    auto vin_at = [&](int c, int k, int bit) -> int64_t& {
      return vin_[(static_cast<std::size_t>(c) * groups + k) * 2 + bit];
    };
    auto acc = [](int64_t& best, int64_t from, int64_t delta) {
      if (from != kNone && from + delta > best) best = from + delta;
    };
    for (int i = n_; i >= 0; --i)
      for (int j = m_; j >= 0; --j) {
        const int c = at(i, j);
        if (!alive_[c]) continue;
        const bool diag = i < n_ && j < m_ && (in_[at(i + 1, j + 1)] & kDiag);
        const bool noop = diag && src_[i] == hyp_[j];
        const bool del = i < n_ && (in_[at(i + 1, j)] & kDel);
        const bool ins = j < m_ && (in_[at(i, j + 1)] & kIns);
        for (int bit = 0; bit < 2; ++bit) {
          int64_t best = i == n_ && j == m_ ? 0 : kNone;
          if (noop) acc(best, vout_[at(i + 1, j + 1) * 2], -kB);
          if (del) acc(best, vin_at(at(i + 1, j), 0, 0), -kB - 1);
          if (ins) acc(best, vin_at(at(i, j + 1), 0, bit), -kB - 1);
          if (diag && !noop) acc(best, vin_at(at(i + 1, j + 1), 0, 0), -kB - 1);
          for (const Jump& jp : jumps_[c]) {
            if (jp.ins && bit) continue;
            acc(best, vout_[at(jp.di, jp.dj) * 2 + (jp.ins ? 1 : 0)], kA);
          }
          vout_[c * 2 + bit] = best;
        }
        for (int k = 0; k < groups; ++k)
          for (int bit = 0; bit < 2; ++bit) {
            int64_t best = vout_[c * 2 + bit];  // the edit ends here
            if (del) acc(best, vin_at(at(i + 1, j), k, 0), -kB);
            if (ins) acc(best, vin_at(at(i, j + 1), k, bit), -kB);
            if (diag && !noop) acc(best, vin_at(at(i + 1, j + 1), k, 0), -kB);
            if (noop && k < cap)
              acc(best, vin_at(at(i + 1, j + 1), k + 1, 0), -kB);
            vin_at(c, k, bit) = best;
          }
      }
    const int64_t v = vout_[0];
    if (v == kNone)
      throw ScoringError("alignment lattice has no complete path");
    return v;
  }

  MatchParams params_;
  Sentence src_raw_, hyp_raw_;
  Sentence src_, hyp_;
  int n_ = 0, m_ = 0, nc_ = 0;
  std::vector<unsigned char> in_;
  std::vector<char> alive_;
  std::vector<std::vector<Jump>> jumps_;
  std::vector<int64_t> vout_, vin_;
};

// The best edit sequence for one sentence pair against one annotator's gold
// edits. Unmatched edits come out with default metadata (error type "UNK", no
// annotator).
inline std::vector<Edit> extract_system_edits(const Sentence& source,
                                              const Sentence& hypothesis,
                                              const std::vector<Edit>& gold,
                                              const MatchParams& params = {}) {
  validate_edits(source.size(), gold, "gold edits");
  SentenceMatcher matcher(source, hypothesis, params);
  return matcher.best_edits(gold);
}

inline std::map<int, MatchCounts> score_sentence(
    const Sentence& source, const Sentence& hypothesis,
    const std::map<int, std::vector<Edit>>& gold_by_annotator,
    const MatchParams& params = {}) {
  if (gold_by_annotator.empty())
    throw ValidationError("score_sentence: no annotators supplied");
  SentenceMatcher matcher(source, hypothesis, params);
  std::map<int, MatchCounts> out;
  for (const auto& [id, edits] : gold_by_annotator) {
    validate_edits(source.size(), edits, "annotator " + std::to_string(id));
    out[id] = matcher.counts(edits);
  }
  return out;
}

struct CorpusScore {
  MatchCounts counts;
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

// Cumulative scoring: per sentence, the annotator kept is the one whose
// counts give the best running F after addition; ties fall to the higher
// running tp, then the lower running proposed + beta^2 * gold, then the
// lowest annotator id. Sentence counts are computed in parallel first; the
// selection fold itself is order-dependent and stays sequential.
inline CorpusScore score_corpus(const Corpus& corpus, const HypothesisSet& hyp,
                                const MatchParams& params = {}, int jobs = 1) {
  if (corpus.sentences.size() != hyp.sentences.size())
    throw ScoringError("corpus '" + corpus.name + "' has " +
                       std::to_string(corpus.sentences.size()) +
                       " sentences but system '" + hyp.system_name +
                       "' supplied " + std::to_string(hyp.sentences.size()));

  std::vector<std::map<int, MatchCounts>> per_sentence(corpus.sentences.size());
  parallel_for(corpus.sentences.size(), jobs, [&](std::size_t s) {
    const AnnotatedSentence& sent = corpus.sentences[s];
    if (sent.gold.empty()) {
      const std::map<int, std::vector<Edit>> unannotated{{0, {}}};
      per_sentence[s] =
          score_sentence(sent.source, hyp.sentences[s], unannotated, params);
    } else {
      per_sentence[s] =
          score_sentence(sent.source, hyp.sentences[s], sent.gold, params);
    }
  });

  MatchCounts total;
  const double sqbeta = params.beta * params.beta;
  for (const auto& by_annotator : per_sentence) {
    const MatchCounts* chosen = nullptr;
    double best_f = 0.0, best_weight = 0.0;
    long long best_tp = 0;
    for (const auto& [id, c] : by_annotator) {
      MatchCounts cand = total;
      cand += c;
      const double f = f_beta(cand, params.beta);
      const double weight = static_cast<double>(cand.tp + cand.fp) +
                            sqbeta * static_cast<double>(cand.tp + cand.fn);
      if (chosen == nullptr || f > best_f ||
          (f == best_f && cand.tp > best_tp) ||
          (f == best_f && cand.tp == best_tp && weight < best_weight)) {
        chosen = &c;
        best_f = f;
        best_tp = cand.tp;
        best_weight = weight;
      }
    }
    total += *chosen;
  }

  CorpusScore out;
  out.counts = total;
  out.precision = precision(total);
  out.recall = recall(total);
  out.f = f_beta(total, params.beta);
  return out;
}

}  // namespace gecval

#endif  // GECVAL_MAXMATCH_HPP
