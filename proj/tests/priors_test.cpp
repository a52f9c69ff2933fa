#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "lexinduce/error.hpp"
#include "lexinduce/priors.hpp"

using namespace lexinduce;

namespace {

std::string temp_path(const std::string& name) { return testing::TempDir() + name; }

Sentence tokens(const std::vector<std::string>& words) {
  Vocabulary v(words);
  return Sentence::from_tokens("s", words, {}, v);
}

}  // namespace

TEST(Concreteness, ExcerptReproducesPublishedScores) {
  auto lex = ConcretenessLexicon::load(LEXINDUCE_DATA_DIR "/concreteness_excerpt.tsv");
  EXPECT_NEAR(lex.lookup("fans"), 0.942, 1e-12);
  EXPECT_NEAR(lex.lookup("basketball"), 0.994, 1e-12);
  EXPECT_NEAR(lex.lookup("game"), 0.9, 1e-12);
  EXPECT_NEAR(lex.lookup("in"), 0.6, 1e-12);
  EXPECT_NEAR(lex.lookup("Basketball"), 0.994, 1e-12);
  EXPECT_EQ(lex.lookup("zebra"), 0.0);
}

TEST(Concreteness, AffineModeDiffers) {
  auto lex = ConcretenessLexicon::load(LEXINDUCE_DATA_DIR "/concreteness_excerpt.tsv", NormalizationMode::Affine1To5);
  EXPECT_NEAR(lex.lookup("basketball"), 0.9925, 1e-12);
  EXPECT_NEAR(lex.lookup("in"), 0.5, 1e-12);
  EXPECT_EQ(parse_normalization_mode("affine_1_5"), NormalizationMode::Affine1To5);
  EXPECT_THROW(parse_normalization_mode("log"), ConfigError);
}

TEST(Concreteness, BadRowsNameTheLine) {
  std::istringstream out_of_range("dog\t4.8\ncat\t6.0\n");
  try {
    ConcretenessLexicon::parse(out_of_range, "ratings.tsv", NormalizationMode::DivideBy5);
    FAIL() << "expected an error";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("ratings.tsv:2"), std::string::npos) << e.what();
  }
  std::istringstream malformed("dog 4.8\n");
  EXPECT_THROW(ConcretenessLexicon::parse(malformed, "x", NormalizationMode::DivideBy5), InputError);
  std::istringstream not_number("dog\tfour\n");
  EXPECT_THROW(ConcretenessLexicon::parse(not_number, "x", NormalizationMode::DivideBy5), InputError);
}

TEST(Potentials, RootPotential) {
  auto lex = std::make_shared<ConcretenessLexicon>();
  lex->insert_raw("game", 4.5);
  auto s = tokens({"the", "game"});
  PriorBundle p;
  p.lexicon = lex;
  EXPECT_EQ(p.root_potential(s, 1), 0.0);
  p.lambda_c = 1.3;
  EXPECT_NEAR(p.root_potential(s, 1), 1.17, 1e-12);
  p.lambda_c = 3.0;
  EXPECT_EQ(p.root_potential(s, 0), 0.0);
}

TEST(Potentials, SpanPotentialIsExactTripleMembership) {
  auto spans = std::make_shared<RewardedSpanSet>();
  PriorBundle p;
  p.lambda_v = 2.0;
  p.spans = spans;
  EXPECT_EQ(p.span_potential("s", 1, 2, 2), 0.0);
  spans->add("s", {1, 2, 2});
  EXPECT_EQ(p.span_potential("s", 1, 2, 2), 2.0);
  EXPECT_EQ(p.span_potential("s", 1, 2, 1), 0.0);
  EXPECT_EQ(p.span_potential("t", 1, 2, 2), 0.0);
}

TEST(Potentials, BundleValidation) {
  PriorBundle p;
  p.lambda_c = 1.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p.lambda_c = 0.0;
  p.lambda_v = 1.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p.lambda_v = -1.0;
  p.spans = std::make_shared<RewardedSpanSet>();
  EXPECT_THROW(p.validate(), ConfigError);
  p.lambda_v = 1.0;
  EXPECT_NO_THROW(p.validate());
  EXPECT_EQ(parse_placement("root"), Placement::Root);
  EXPECT_EQ(parse_placement("non_root"), Placement::NonRoot);
  EXPECT_THROW(parse_placement("everywhere"), ConfigError);
}

TEST(Potentials, DecodingBundleDropsWeightsWhenDisabled) {
  PriorBundle p;
  p.lambda_c = 2.0;
  p.lambda_v = 1.0;
  EXPECT_EQ(p.for_decoding().lambda_c, 2.0);
  p.inference_priors_enabled = false;
  EXPECT_EQ(p.for_decoding().lambda_c, 0.0);
  EXPECT_EQ(p.for_decoding().lambda_v, 0.0);
}

TEST(Potentials, SentenceBindingAndPlacement) {
  auto spans = std::make_shared<RewardedSpanSet>();
  spans->add("s", {0, 2, 0});
  spans->add("s", {1, 2, 2});
  PriorBundle p;
  p.lambda_v = 1.5;
  p.spans = spans;
  auto s = tokens({"a", "b", "c"});
  auto sp = SentencePriors::bind(p, s);
  EXPECT_EQ(sp.span_bonus(1, 2, 2), 1.5);
  EXPECT_EQ(sp.span_bonus(0, 2, 0), 1.5);
  p.placement = Placement::Root;
  sp = SentencePriors::bind(p, s);
  EXPECT_EQ(sp.span_bonus(1, 2, 2), 0.0);
  EXPECT_EQ(sp.span_bonus(0, 2, 0), 1.5);
  spans->add("s", {1, 3, 3});
  EXPECT_THROW(SentencePriors::bind(p, s), InputError);
}

TEST(RewardedSpans, AddValidatesAndDeduplicates) {
  RewardedSpanSet set;
  EXPECT_THROW(set.add("s", {2, 2, 2}), InputError);
  EXPECT_THROW(set.add("s", {3, 1, 1}), InputError);
  EXPECT_THROW(set.add("s", {0, 3, 1}), InputError);
  set.add("s", {0, 3, 3});
  set.add("s", {0, 3, 3});
  EXPECT_EQ(set.spans_for("s").size(), 1u);
  EXPECT_TRUE(set.spans_for("missing").empty());
}

TEST(RewardedSpans, JsonLinesRoundTrip) {
  RewardedSpanSet set;
  set.add("b", {1, 2, 2});
  set.add("b", {2, 3, 2});
  set.ensure("a");
  const auto path = temp_path("spans_roundtrip.jsonl");
  set.save_jsonl(path, {"b", "a"});
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  EXPECT_EQ(text.str(), "{\"sentence_id\":\"b\",\"spans\":[[1,2,2],[2,3,2]]}\n{\"sentence_id\":\"a\",\"spans\":[]}\n");
  auto back = RewardedSpanSet::load_jsonl(path);
  EXPECT_EQ(back.all(), set.all());

  std::ofstream bad(temp_path("spans_bad.jsonl"));
  bad << "{\"sentence_id\":\"x\",\"spans\":[[1,2]]}\n";
  bad.close();
  EXPECT_ANY_THROW(RewardedSpanSet::load_jsonl(temp_path("spans_bad.jsonl")));
}
