#include <gtest/gtest.h>

#include <cmath>

#include <json.hpp>

#include "lexinduce/error.hpp"
#include "lexinduce/grammar.hpp"
#include "support.hpp"

using namespace lexinduce;
using testing_support::random_grammar;
using testing_support::word_vocab;

TEST(Vocabulary, UnkIsZeroAndOrderIsFirstOccurrence) {
  auto v = Vocabulary::build({{"The", "dog"}, {"a", "dog", "runs"}}, 1);
  EXPECT_EQ(v.word(0), "<unk>");
  EXPECT_EQ(v.id("the"), 1);
  EXPECT_EQ(v.id("dog"), 2);
  EXPECT_EQ(v.id("zebra"), 0);
  EXPECT_EQ(v.size(), 5);
  auto v2 = Vocabulary::build({{"the", "dog"}, {"a", "dog", "runs"}}, 2);
  EXPECT_EQ(v2.size(), 2);
  EXPECT_TRUE(v2.contains("dog"));
  EXPECT_THROW(v.word(99), std::out_of_range);
}

TEST(Grammar, NewRandomIsDeterministic) {
  GrammarConfig c;
  c.num_nonterminals = 3;
  c.num_preterminals = 2;
  c.seed = 11;
  auto a = LexGrammar::new_random(c, word_vocab(4));
  auto b = LexGrammar::new_random(c, word_vocab(4));
  EXPECT_EQ(a.logits(), b.logits());
  c.seed = 12;
  auto d = LexGrammar::new_random(c, word_vocab(4));
  EXPECT_NE(a.logits(), d.logits());
}

TEST(Grammar, TableSizes) {
  auto g = random_grammar(1, 3, 2, 4);
  const auto& s = g.shape();
  EXPECT_EQ(g.logits().root.size(), 3u);
  EXPECT_EQ(g.logits().head.size(), 3u * 4 * 2 * 5);
  EXPECT_EQ(g.logits().dep.size(), 2u * 3 * 5 * 5);
  EXPECT_EQ(g.logits().emit.size(), 2u * 4);
  EXPECT_EQ(s.symbols(), 5);
}

TEST(Grammar, ConfigValidation) {
  GrammarConfig c;
  c.num_nonterminals = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c.num_nonterminals = 2;
  c.num_preterminals = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c.num_preterminals = 2;
  c.emission_smoothing = -1;
  EXPECT_THROW(c.validate(), ConfigError);
}

// Naive softmax per context, computed straight from the definition.
TEST(Grammar, LogNormalizeMatchesNaiveSoftmax) {
  auto g = random_grammar(5, 2, 3, 3);
  const auto& s = g.shape();
  const auto& x = g.logits();
  auto lp = g.log_probs();
  const int S = s.symbols();

  double z = 0;
  for (double v : x.root) z += std::exp(v);
  for (int a = 0; a < s.nonterminals; ++a) EXPECT_NEAR(lp.root[a], std::log(std::exp(x.root[a]) / z), 1e-12);

  for (int a = 0; a < s.nonterminals; ++a)
    for (int w = 0; w < s.vocab; ++w) {
      double zz = 0;
      for (int k = 0; k < 2 * S; ++k) zz += std::exp(x.head[s.head_context(a, w) + k]);
      for (int k = 0; k < 2 * S; ++k) {
        auto i = s.head_context(a, w) + k;
        EXPECT_NEAR(lp.head[i], std::log(std::exp(x.head[i]) / zz), 1e-12);
      }
    }
  for (int d = 0; d < 2; ++d)
    for (int a = 0; a < s.nonterminals; ++a)
      for (int b = 0; b < S; ++b) {
        auto base = s.dep_context(static_cast<Direction>(d), a, b);
        double zz = 0;
        for (int c = 0; c < S; ++c) zz += std::exp(x.dep[base + c]);
        for (int c = 0; c < S; ++c) EXPECT_NEAR(lp.dep[base + c], std::log(std::exp(x.dep[base + c]) / zz), 1e-12);
      }
  for (Symbol t = s.nonterminals; t < S; ++t) {
    double zz = 0;
    for (int w = 0; w < s.vocab; ++w) zz += std::exp(x.emit[s.emit_index(t, w)]);
    for (int w = 0; w < s.vocab; ++w) {
      auto i = s.emit_index(t, w);
      EXPECT_NEAR(lp.emit[i], std::log(std::exp(x.emit[i]) / zz), 1e-12);
    }
  }
}

TEST(Grammar, ShiftInvariancePerContext) {
  auto g = random_grammar(8, 2, 2, 3);
  auto before = g.log_probs();
  const auto& s = g.shape();
  auto& x = g.mutable_logits();
  for (auto& v : x.root) v += 4.0;
  for (int k = 0; k < 2 * s.symbols(); ++k) x.head[s.head_context(1, 2) + k] -= 7.5;
  for (int c = 0; c < s.symbols(); ++c) x.dep[s.dep_context(Direction::Right, 0, 3) + c] += 100.0;
  for (int w = 0; w < s.vocab; ++w) x.emit[s.emit_index(3, w)] += 0.25;
  auto after = g.log_probs();
  for (std::size_t i = 0; i < before.head.size(); ++i) EXPECT_NEAR(before.head[i], after.head[i], 1e-12);
  for (std::size_t i = 0; i < before.dep.size(); ++i) EXPECT_NEAR(before.dep[i], after.dep[i], 1e-10);
  for (std::size_t i = 0; i < before.root.size(); ++i) EXPECT_NEAR(before.root[i], after.root[i], 1e-12);
  for (std::size_t i = 0; i < before.emit.size(); ++i) EXPECT_NEAR(before.emit[i], after.emit[i], 1e-12);
}

TEST(Grammar, RuleLogprobAgreesWithTables) {
  auto g = random_grammar(2, 2, 2, 3);
  auto lp = g.log_probs();
  const auto& s = g.shape();
  BinaryRule r{1, 2, Direction::Right, 3, 0};
  EXPECT_NEAR(g.rule_logprob(r), lp.head[s.head_index(1, 2, Direction::Right, 3)] +
                                      lp.dep[s.dep_index(Direction::Right, 1, 3, 0)], 1e-12);
  EXPECT_NEAR(g.rule_logprob(RootRule{1}), lp.root[1], 1e-12);
  EXPECT_NEAR(g.rule_logprob(EmissionRule{2, 1}), lp.emit[s.emit_index(2, 1)], 1e-12);
  EXPECT_THROW(g.rule_logprob(RootRule{2}), std::out_of_range);
  EXPECT_THROW(g.rule_logprob(EmissionRule{0, 1}), std::out_of_range);
  EXPECT_THROW(g.rule_logprob(BinaryRule{0, 9, Direction::Left, 0, 0}), std::out_of_range);
}

TEST(Grammar, JsonRoundTrip) {
  auto g = random_grammar(4, 2, 3, 4);
  auto text = g.to_json();
  auto back = LexGrammar::from_json(text);
  EXPECT_EQ(back.logits(), g.logits());
  EXPECT_EQ(back.vocab(), g.vocab());
  EXPECT_EQ(back.to_json(), text);
}

TEST(Grammar, GoldenFileValues) {
  auto g = LexGrammar::load(LEXINDUCE_TEST_DATA "/grammar_v1.json");
  EXPECT_EQ(g.shape().nonterminals, 1);
  EXPECT_EQ(g.shape().preterminals, 1);
  EXPECT_EQ(g.vocab().id("dog"), 1);
  EXPECT_NEAR(g.rule_logprob(RootRule{0}), 0.0, 1e-15);
  EXPECT_NEAR(g.rule_logprob(BinaryRule{0, 1, Direction::Left, 1, 0}), std::log(0.5) + std::log(0.5), 1e-12);
  EXPECT_NEAR(g.rule_logprob(BinaryRule{0, 0, Direction::Right, 1, 0}), std::log(0.25) + std::log(2.0 / 3.0),
              1e-12);
  EXPECT_NEAR(g.rule_logprob(EmissionRule{1, 1}), 2.0 - std::log1p(std::exp(2.0)), 1e-12);
}

TEST(Grammar, MalformedFilesAreRejected) {
  auto g = random_grammar(4, 2, 3, 4);
  auto j = nlohmann::json::parse(g.to_json());
  auto bad = j;
  bad["num_preterminals"] = 4;
  EXPECT_THROW(LexGrammar::from_json(bad.dump()), FormatError);
  bad = j;
  bad["version"] = "lexinduce-grammar/0";
  EXPECT_THROW(LexGrammar::from_json(bad.dump()), FormatError);
  bad = j;
  bad["tables"]["emit"][0].erase(0);
  EXPECT_THROW(LexGrammar::from_json(bad.dump()), FormatError);
  EXPECT_THROW(LexGrammar::from_json("{not json"), FormatError);
  EXPECT_THROW(LexGrammar::load("/nonexistent/grammar.json"), InputError);
}
