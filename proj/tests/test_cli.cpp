// Drives the installed gecval binary as a subprocess; the path arrives via
// --gecval-bin on the test command line.

#include <gtest/gtest.h>

#include <string>
#include <vector>

#include <json.hpp>

#include "testutil.hpp"

using testutil::CommandResult;
using testutil::TempDir;
using testutil::contains;
using testutil::read_file;
using testutil::run_command;
using testutil::shq;
using testutil::write_file;

namespace {

std::string bin() { return shq(g_gecval_bin); }

// Three sentences, one annotator. Gold edits: x->y in each sentence plus
// g->h in the third, so a hypothesis can hit tp=2, fp=1, fn=2 exactly.
const char kScoreCorpus[] =
    "S a x b\n"
    "A 1 2|||UNK|||y|||REQUIRED|||-NONE-|||0\n"
    "\n"
    "S c x d\n"
    "A 1 2|||UNK|||y|||REQUIRED|||-NONE-|||0\n"
    "\n"
    "S e x f g\n"
    "A 1 2|||UNK|||y|||REQUIRED|||-NONE-|||0\n"
    "A 3 4|||UNK|||h|||REQUIRED|||-NONE-|||0\n";

TEST(Cli, VersionFlag) {
  const CommandResult r = run_command(bin() + " --version");
  EXPECT_EQ(r.status, 0);
  EXPECT_TRUE(contains(r.output, "gecval 0.1.0")) << r.output;
}

TEST(Cli, NoSubcommandFails) {
  const CommandResult r = run_command(bin());
  EXPECT_EQ(r.status, 1);
}

TEST(Cli, UnknownFlagFails) {
  const CommandResult r = run_command(bin() + " score --no-such-flag");
  EXPECT_EQ(r.status, 1);
}

TEST(Cli, ScorePrintsPrecisionRecallF) {
  TempDir dir;
  write_file(dir.file("c.m2"), kScoreCorpus);
  write_file(dir.file("hyp.txt"), "a y b\nc y d\ne x f q\n");
  const CommandResult r = run_command(bin() + " score --m2 " +
                                      shq(dir.file("c.m2")) + " --hyp " +
                                      shq(dir.file("hyp.txt")));
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.output, "P 66.67, R 50.00, F0.5 62.50\n");
}

TEST(Cli, GoldAsHypothesisGetsFullRecall) {
  TempDir dir;
  write_file(dir.file("c.m2"), kScoreCorpus);
  write_file(dir.file("hyp.txt"), "a y b\nc y d\ne y f h\n");
  const CommandResult r = run_command(
      bin() + " score --metric f_beta,gleu,wer --m2 " + shq(dir.file("c.m2")) +
      " --hyp " + shq(dir.file("hyp.txt")));
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.output,
            "P 100.00, R 100.00, F0.5 100.00\n"
            "GLEU 100.00 (std 0.00 over 1 iterations)\n"
            "WER 40.00\n");
}

TEST(Cli, ScoreBetaFlagChangesTheLabel) {
  TempDir dir;
  write_file(dir.file("c.m2"), kScoreCorpus);
  write_file(dir.file("hyp.txt"), "a y b\nc y d\ne x f q\n");
  const CommandResult r = run_command(bin() + " score --beta 1 --m2 " +
                                      shq(dir.file("c.m2")) + " --hyp " +
                                      shq(dir.file("hyp.txt")));
  EXPECT_EQ(r.status, 0);
  // F1 = 2PR/(P+R) with P=2/3, R=1/2
  EXPECT_EQ(r.output, "P 66.67, R 50.00, F1 57.14\n");
}

TEST(Cli, ScoreMissingFileIsAnIoError) {
  const CommandResult r =
      run_command(bin() + " score --m2 /nonexistent/x.m2 --hyp /nonexistent/y");
  EXPECT_EQ(r.status, 3);
  EXPECT_TRUE(contains(r.output, "gecval: io:")) << r.output;
}

TEST(Cli, StatsMarkdownAndCsv) {
  TempDir dir;
  write_file(dir.file("c.m2"), kScoreCorpus);
  const CommandResult md =
      run_command(bin() + " stats --m2 " + shq(dir.file("c.m2")));
  EXPECT_EQ(md.status, 0);
  EXPECT_TRUE(contains(md.output,
                       "| Corpus | Sentences | References | WER | Topics | "
                       "Multiple L1 | Multiple proficiency |"))
      << md.output;
  EXPECT_TRUE(contains(md.output, "| c | 3 | 1 | 40.00 | - | no | no |"))
      << md.output;

  const CommandResult csv = run_command(bin() + " stats --format csv --m2 " +
                                        shq(dir.file("c.m2")));
  EXPECT_EQ(csv.status, 0);
  EXPECT_EQ(csv.output,
            "corpus,sentences,references,wer,topics,multiple_l1,"
            "multiple_proficiency\nc,3,1,40.00,-,false,false\n");
}

TEST(Cli, StatsJsonParses) {
  TempDir dir;
  write_file(dir.file("c.m2"), kScoreCorpus);
  const CommandResult r = run_command(bin() + " stats --format json --m2 " +
                                      shq(dir.file("c.m2")));
  EXPECT_EQ(r.status, 0);
  const nlohmann::json doc = nlohmann::json::parse(r.output);
  ASSERT_EQ(doc.size(), 1u);
  EXPECT_EQ(doc[0].at("name"), "c");
  EXPECT_EQ(doc[0].at("sentences"), 3);
  EXPECT_EQ(doc[0].at("references"), 1);
  EXPECT_NEAR(doc[0].at("wer").get<double>(), 0.4, 1e-12);
}

TEST(Cli, StatsNeedsExactlyOneSource) {
  const CommandResult r = run_command(bin() + " stats");
  EXPECT_EQ(r.status, 1);
  EXPECT_TRUE(contains(r.output, "stats needs either --m2 or --manifest"))
      << r.output;
}

TEST(Cli, StatsRejectsMalformedM2WithALineNumber) {
  TempDir dir;
  write_file(dir.file("bad.m2"), "S a b\nS c d\n");
  const CommandResult r =
      run_command(bin() + " stats --m2 " + shq(dir.file("bad.m2")));
  EXPECT_EQ(r.status, 1);
  EXPECT_TRUE(contains(r.output, "gecval: parse:")) << r.output;
  EXPECT_TRUE(contains(r.output, "bad.m2:2")) << r.output;
}

TEST(Cli, ValidateCleanFiles) {
  TempDir dir;
  write_file(dir.file("c.m2"), kScoreCorpus);
  write_file(dir.file("hyp.txt"), "a y b\nc y d\ne y f h\n");
  const CommandResult r =
      run_command(bin() + " validate --m2 " + shq(dir.file("c.m2")) +
                  " --hyp " + shq(dir.file("hyp.txt")));
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.output, "validated 2 file(s): no problems found\n");
}

TEST(Cli, ValidateListsEveryProblem) {
  TempDir dir;
  write_file(dir.file("bad.m2"),
             "S a b\n"
             "A 0 1|||UNK|||x\n"
             "\n"
             "S c d\n"
             "A 5 6|||UNK|||x|||REQUIRED|||-NONE-|||0\n");
  const CommandResult r =
      run_command(bin() + " validate --m2 " + shq(dir.file("bad.m2")));
  EXPECT_EQ(r.status, 1);
  EXPECT_TRUE(contains(r.output, "bad.m2:2")) << r.output;
  EXPECT_TRUE(contains(r.output, "6 '|||'-separated fields")) << r.output;
  EXPECT_TRUE(contains(r.output, "out of bounds")) << r.output;
}

TEST(Cli, ValidateChecksHypothesisLineCounts) {
  TempDir dir;
  write_file(dir.file("c.m2"), kScoreCorpus);
  write_file(dir.file("short.txt"), "a y b\n");
  const CommandResult r =
      run_command(bin() + " validate --m2 " + shq(dir.file("c.m2")) +
                  " --hyp " + shq(dir.file("short.txt")));
  EXPECT_EQ(r.status, 1);
  EXPECT_TRUE(contains(r.output, "1 lines, but the corpus has 3 sentences"))
      << r.output;
}

TEST(Cli, ValidateHypNeedsOneCorpus) {
  TempDir dir;
  write_file(dir.file("h.txt"), "a\n");
  const CommandResult r =
      run_command(bin() + " validate --hyp " + shq(dir.file("h.txt")));
  EXPECT_EQ(r.status, 1);
  EXPECT_TRUE(contains(r.output, "exactly one --m2 corpus")) << r.output;
}

TEST(Cli, ConvertWritesSourceAndPerAnnotatorReferences) {
  TempDir dir;
  write_file(dir.file("c.m2"),
             "S a x b\n"
             "A 1 2|||UNK|||y|||REQUIRED|||-NONE-|||0\n"
             "A 1 2|||UNK|||z|||REQUIRED|||-NONE-|||1\n"
             "\n"
             "S c d\n"
             "A 0 1|||UNK|||e|||REQUIRED|||-NONE-|||0\n");
  const std::string prefix = dir.file("out").string();
  const CommandResult r = run_command(bin() + " convert --m2 " +
                                      shq(dir.file("c.m2")) + " --out " +
                                      shq(prefix));
  EXPECT_EQ(r.status, 0);
  EXPECT_TRUE(contains(r.output, "wrote " + prefix + ".src.txt (2 lines)"))
      << r.output;
  EXPECT_TRUE(contains(r.output, "wrote " + prefix + ".ref0.txt (2 lines)"));
  EXPECT_TRUE(contains(r.output, "wrote " + prefix + ".ref1.txt (2 lines)"));
  EXPECT_EQ(read_file(prefix + ".src.txt"), "a x b\nc d\n");
  EXPECT_EQ(read_file(prefix + ".ref0.txt"), "a y b\ne d\n");
  // annotator 1 never saw sentence 2; it falls back to annotator 0's text
  EXPECT_EQ(read_file(prefix + ".ref1.txt"), "a z b\ne d\n");

  const CommandResult first = run_command(
      bin() + " convert --policy first --m2 " + shq(dir.file("c.m2")) +
      " --out " + shq(dir.file("only").string()));
  EXPECT_EQ(first.status, 0);
  EXPECT_TRUE(contains(first.output, ".ref0.txt"));
  EXPECT_FALSE(contains(first.output, ".ref1.txt"));

  // converted files line up with the corpus again
  const CommandResult check = run_command(
      bin() + " validate --m2 " + shq(dir.file("c.m2")) + " --hyp " +
      shq(prefix + ".src.txt") + " --hyp " + shq(prefix + ".ref0.txt") +
      " --hyp " + shq(prefix + ".ref1.txt"));
  EXPECT_EQ(check.status, 0) << check.output;
  EXPECT_TRUE(contains(check.output, "validated 4 file(s)")) << check.output;
}

TEST(Cli, ValidateNamesBothOverlappingEdits) {
  TempDir dir;
  write_file(dir.file("overlap.m2"),
             "S a b c d\n"
             "A 0 2|||UNK|||x|||REQUIRED|||-NONE-|||0\n"
             "A 1 3|||UNK|||y|||REQUIRED|||-NONE-|||0\n");
  const CommandResult r =
      run_command(bin() + " validate --m2 " + shq(dir.file("overlap.m2")));
  EXPECT_EQ(r.status, 1);
  EXPECT_TRUE(contains(r.output, "overlap")) << r.output;
  EXPECT_TRUE(contains(r.output, "(0,2,\"x\")")) << r.output;
  EXPECT_TRUE(contains(r.output, "(1,3,\"y\")")) << r.output;
}

TEST(Cli, ConvertWithoutAnnotators) {
  // An unannotated sentence still gets the implicit annotator 0, so only an
  // empty corpus has no reference files at all.
  TempDir dir;
  write_file(dir.file("c.m2"), "");
  const CommandResult r =
      run_command(bin() + " convert --m2 " + shq(dir.file("c.m2")) +
                  " --out " + shq(dir.file("o").string()));
  EXPECT_EQ(r.status, 0);
  EXPECT_TRUE(contains(r.output, "no annotators found")) << r.output;
  EXPECT_TRUE(contains(r.output, "(0 lines)")) << r.output;
}

// Two systems whose rankings flip between two corpora.
void write_compare_fixture(TempDir& dir) {
  auto corpus = [](int total) {
    std::string text;
    for (int i = 0; i < total; ++i)
      text += "S tok" + std::to_string(i) +
              " x y\nA 1 2|||UNK|||z|||REQUIRED|||-NONE-|||0\n\n";
    return text;
  };
  auto hyp = [](int total, int corrected) {
    std::string text;
    for (int i = 0; i < total; ++i)
      text += "tok" + std::to_string(i) + (i < corrected ? " z y" : " x y") +
              "\n";
    return text;
  };
  write_file(dir.file("one.m2"), corpus(4));
  write_file(dir.file("two.m2"), corpus(4));
  write_file(dir.file("up-one.txt"), hyp(4, 4));
  write_file(dir.file("up-two.txt"), hyp(4, 1));
  write_file(dir.file("down-one.txt"), hyp(4, 1));
  write_file(dir.file("down-two.txt"), hyp(4, 4));
  write_file(dir.file("manifest.json"), R"({
    "corpora": [
      {"name": "one", "format": "m2", "path": "one.m2"},
      {"name": "two", "format": "m2", "path": "two.m2"}
    ],
    "systems": [
      {"name": "up", "runs": [{"id": 1, "hypotheses": {"one": "up-one.txt", "two": "up-two.txt"}}]},
      {"name": "down", "runs": [{"id": 1, "hypotheses": {"one": "down-one.txt", "two": "down-two.txt"}}]}
    ],
    "metrics": ["f_beta", "wer"]
  })");
}

TEST(Cli, CompareReportsRankFlipAndRerunsIdentically) {
  TempDir dir;
  write_compare_fixture(dir);
  const std::string base = bin() + " compare --manifest " +
                           shq(dir.file("manifest.json")) + " --out ";
  const CommandResult r1 = run_command(base + shq(dir.file("rep1")));
  ASSERT_EQ(r1.status, 0) << r1.output;
  EXPECT_TRUE(contains(r1.output, "f_beta: corpora DISAGREE on the top system"))
      << r1.output;
  EXPECT_TRUE(
      contains(r1.output, "report written to " + dir.file("rep1").string()));

  const std::string rankings = read_file(dir.file("rep1") / "rankings.md");
  EXPECT_TRUE(contains(rankings, "DISAGREE")) << rankings;
  EXPECT_TRUE(contains(rankings, "-1.00")) << rankings;  // reversed 2-system tau

  const CommandResult r2 = run_command(base + shq(dir.file("rep2")));
  ASSERT_EQ(r2.status, 0);
  for (const char* name :
       {"scores.csv", "rankings.md", "extremes.md", "report.json"}) {
    EXPECT_EQ(read_file(dir.file("rep1") / name),
              read_file(dir.file("rep2") / name))
        << name;
  }
}

TEST(Cli, CompareHonorsOutEnvVar) {
  TempDir dir;
  write_compare_fixture(dir);
  const CommandResult r = run_command(
      "GECVAL_OUT=" + shq(dir.file("envdir")) + " " + bin() +
      " compare --manifest " + shq(dir.file("manifest.json")));
  EXPECT_EQ(r.status, 0) << r.output;
  EXPECT_TRUE(contains(r.output,
                       "report written to " + dir.file("envdir").string()))
      << r.output;
  EXPECT_TRUE(std::filesystem::exists(dir.file("envdir") / "report.json"));
}

TEST(Cli, CompareRejectsAnEmptySystemsList) {
  TempDir dir;
  write_file(dir.file("c.m2"), "S a b\n");
  write_file(dir.file("manifest.json"), R"({
    "corpora": [{"name": "c", "format": "m2", "path": "c.m2"}],
    "systems": [],
    "metrics": ["f_beta"]
  })");
  const CommandResult r = run_command(bin() + " compare --manifest " +
                                      shq(dir.file("manifest.json")) +
                                      " --out " + shq(dir.file("rep")));
  EXPECT_EQ(r.status, 1);
  EXPECT_TRUE(contains(r.output, "no systems configured")) << r.output;
  EXPECT_TRUE(contains(r.output, "gecval: validate:")) << r.output;
}

TEST(Cli, CompareKeepGoingStillWritesAReport) {
  TempDir dir;
  write_compare_fixture(dir);
  write_file(dir.file("up-two.txt"), "only one line\n");  // break one entry
  const std::string cmd_base = bin() + " compare --manifest " +
                               shq(dir.file("manifest.json"));
  const CommandResult hard =
      run_command(cmd_base + " --out " + shq(dir.file("hard")));
  EXPECT_EQ(hard.status, 2);
  EXPECT_TRUE(contains(hard.output, "gecval: scoring:")) << hard.output;

  const CommandResult soft = run_command(cmd_base + " --keep-going --out " +
                                         shq(dir.file("soft")));
  EXPECT_EQ(soft.status, 2);  // failures still flagged, but work continued
  EXPECT_TRUE(contains(soft.output, "gecval: scoring:")) << soft.output;
  EXPECT_TRUE(std::filesystem::exists(dir.file("soft") / "scores.csv"));
  const std::string csv = read_file(dir.file("soft") / "scores.csv");
  EXPECT_TRUE(contains(csv, "down,one")) << csv;
}

}  // namespace
