#include <gtest/gtest.h>

#include <string>

#include "gecval/m2.hpp"
#include "testutil.hpp"

using namespace gecval;
using testutil::contains;

namespace {

const char kSmallCorpus[] =
    "S The cat sat on mat .\n"
    "A 4 4|||ArtOrDet|||the|||REQUIRED|||-NONE-|||0\n"
    "A 4 4|||ArtOrDet|||a|||REQUIRED|||-NONE-|||1\n"
    "\n"
    "S He go to school .\n"
    "A 1 2|||Vform|||goes|||REQUIRED|||-NONE-|||0\n"
    "A 1 2|||Vform|||went|||REQUIRED|||-NONE-|||1\n"
    "A 4 5|||Mec|||-NONE-|||REQUIRED|||-NONE-|||1\n"
    "\n"
    "S All good here .\n"
    "A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\n"
    "\n"
    "S Sentence nobody looked at .\n";

TEST(ParseM2, ReadsBlocksAndAnnotators) {
  const M2Document doc = parse_m2(kSmallCorpus);
  ASSERT_EQ(doc.sentences.size(), 4u);

  const AnnotatedSentence& first = doc.sentences[0];
  EXPECT_EQ(first.source, tokenize("The cat sat on mat ."));
  ASSERT_EQ(first.gold.size(), 2u);
  ASSERT_EQ(first.gold.at(0).size(), 1u);
  EXPECT_EQ(first.gold.at(0)[0].start, 4);
  EXPECT_EQ(first.gold.at(0)[0].end, 4);
  EXPECT_EQ(first.gold.at(0)[0].replacement, (Sentence{"the"}));
  EXPECT_EQ(first.gold.at(0)[0].error_type, "ArtOrDet");
  EXPECT_EQ(first.gold.at(0)[0].annotator_id, 0);
  EXPECT_EQ(first.gold.at(1)[0].replacement, (Sentence{"a"}));

  const AnnotatedSentence& second = doc.sentences[1];
  ASSERT_EQ(second.gold.at(1).size(), 2u);
  EXPECT_EQ(second.gold.at(1)[1].replacement, Sentence{});  // -NONE- deletes

  // noop marks the sentence correct: annotator present, no edits
  const AnnotatedSentence& third = doc.sentences[2];
  ASSERT_EQ(third.gold.size(), 1u);
  EXPECT_TRUE(third.gold.at(0).empty());

  // a block without A lines gets a default empty annotator 0
  const AnnotatedSentence& fourth = doc.sentences[3];
  ASSERT_EQ(fourth.gold.size(), 1u);
  EXPECT_TRUE(fourth.gold.at(0).empty());
}

TEST(ParseM2, MissingTrailingBlankLineStillFlushes) {
  const M2Document doc = parse_m2("S a b\nA 0 1|||UNK|||x|||REQUIRED|||-NONE-|||0");
  ASSERT_EQ(doc.sentences.size(), 1u);
  EXPECT_EQ(doc.sentences[0].gold.at(0)[0].replacement, (Sentence{"x"}));
}

TEST(ParseM2, SplitsAlternativeRewrites) {
  const M2Document doc = parse_m2(
      "S She like him .\n"
      "A 1 2|||SVA|||likes||liked|||REQUIRED|||-NONE-|||0\n"
      "A 2 3|||Pron|||her|| -NONE- |||REQUIRED|||-NONE-|||0\n");
  const auto& edits = doc.sentences[0].gold.at(0);
  ASSERT_EQ(edits.size(), 2u);
  EXPECT_EQ(edits[0].replacement, (Sentence{"likes"}));
  ASSERT_EQ(edits[0].alternatives.size(), 1u);
  EXPECT_EQ(edits[0].alternatives[0], (Sentence{"liked"}));
  // whitespace around a '-NONE-' option is trimmed away; it means deletion
  ASSERT_EQ(edits[1].alternatives.size(), 1u);
  EXPECT_EQ(edits[1].alternatives[0], Sentence{});
}

TEST(ParseM2, ErrorsCarryFileAndLine) {
  try {
    parse_m2("S a\nS b\n", "bad.m2");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.file(), "bad.m2");
    EXPECT_EQ(e.line(), 2);
    EXPECT_TRUE(contains(e.what(), "bad.m2:2")) << e.what();
    EXPECT_TRUE(contains(e.what(), "second source line")) << e.what();
  }

  EXPECT_THROW(parse_m2("A 0 1|||UNK|||x|||REQUIRED|||-NONE-|||0\n"), ParseError);
  EXPECT_THROW(parse_m2("S a\nA 0 1|||UNK|||x|||0\n"), ParseError);       // 4 fields
  EXPECT_THROW(parse_m2("S a\nA zero 1|||UNK|||x|||REQUIRED|||-NONE-|||0\n"),
               ParseError);
  EXPECT_THROW(parse_m2("S a\nA 0 1|||UNK|||x|||REQUIRED|||-NONE-|||-2\n"),
               ParseError);
  EXPECT_THROW(parse_m2("What is this line\n"), ParseError);
}

TEST(ParseM2, RejectsEditsPastSentenceEnd) {
  EXPECT_THROW(parse_m2("S a b\nA 1 3|||UNK|||x|||REQUIRED|||-NONE-|||0\n"),
               ValidationError);
}

TEST(ValidateM2Text, CollectsEveryProblem) {
  const std::string text =
      "S a b\n"
      "A 0 9|||UNK|||x|||REQUIRED|||-NONE-|||0\n"
      "\n"
      "A 0 1|||UNK|||x|||REQUIRED|||-NONE-|||0\n"
      "\n"
      "S c\n"
      "A 0 1|||UNK|||y|||0\n";
  const std::vector<std::string> problems = validate_m2_text(text, "multi.m2");
  ASSERT_GE(problems.size(), 3u) << "got: " << ::testing::PrintToString(problems);
}

TEST(ValidateM2Text, CleanFileHasNoProblems) {
  EXPECT_TRUE(validate_m2_text(kSmallCorpus).empty());
}

TEST(SerializeM2, RoundTripsThroughParse) {
  const M2Document doc = parse_m2(kSmallCorpus);
  const std::string text = serialize_m2(doc);
  const M2Document again = parse_m2(text);
  ASSERT_EQ(again.sentences.size(), doc.sentences.size());
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    EXPECT_EQ(again.sentences[s].source, doc.sentences[s].source);
    EXPECT_EQ(again.sentences[s].gold, doc.sentences[s].gold);
  }
  EXPECT_EQ(serialize_m2(again), text);  // canonical form is a fixed point
}

TEST(SerializeM2, KeepsAlternativesAndDeletions) {
  const M2Document doc = parse_m2(
      "S She like him\n"
      "A 1 2|||SVA|||likes||liked|||REQUIRED|||-NONE-|||0\n"
      "A 2 3|||Pron|||-NONE-|||REQUIRED|||-NONE-|||0\n");
  const std::string text = serialize_m2(doc);
  EXPECT_TRUE(contains(text, "likes||liked")) << text;
  EXPECT_TRUE(contains(text, "|||-NONE-|||")) << text;
  EXPECT_EQ(parse_m2(text).sentences[0].gold, doc.sentences[0].gold);
}

TEST(ReferenceSentences, AppliesEachAnnotatorInIdOrder) {
  const M2Document doc = parse_m2(kSmallCorpus);
  const std::vector<Sentence> refs = reference_sentences(doc.sentences[1]);
  ASSERT_EQ(refs.size(), 2u);
  EXPECT_EQ(refs[0], tokenize("He goes to school ."));
  EXPECT_EQ(refs[1], tokenize("He went to school"));
}

TEST(ToParallel, AllAnnotatorsGetAFile) {
  const M2Document doc = parse_m2(kSmallCorpus);
  const ParallelText parallel = to_parallel(doc, AnnotatorPolicy::kAll);
  ASSERT_EQ(parallel.sources.size(), 4u);
  ASSERT_EQ(parallel.annotator_ids, (std::vector<int>{0, 1}));
  ASSERT_EQ(parallel.references.size(), 2u);
  EXPECT_EQ(parallel.references[0][1], "He goes to school .");
  EXPECT_EQ(parallel.references[1][1], "He went to school");
  // an annotator absent from a sentence falls back to annotator 0, then source
  EXPECT_EQ(parallel.references[1][3], "Sentence nobody looked at .");
}

TEST(ToParallel, FirstPolicyKeepsOneReference) {
  const ParallelText parallel =
      to_parallel(parse_m2(kSmallCorpus), AnnotatorPolicy::kFirst);
  EXPECT_EQ(parallel.annotator_ids, (std::vector<int>{0}));
  ASSERT_EQ(parallel.references.size(), 1u);
  EXPECT_EQ(parallel.references[0][0], "The cat sat on the mat .");
}

}  // namespace
