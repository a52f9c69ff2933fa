#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "lexinduce/chart.hpp"
#include "lexinduce/enumerate.hpp"
#include "lexinduce/error.hpp"
#include "lexinduce/logspace.hpp"
#include "support.hpp"

using namespace lexinduce;
using namespace testing_support;

namespace {

Sentence sentence_of(const LexGrammar& g, const std::vector<std::string>& words) {
  return Sentence::from_tokens("s", words, {}, g.vocab());
}

}  // namespace

TEST(Enumerate, TreeCountMatchesClosedForm) {
  // Catalan(n-1) bracketings, two head choices per internal node, labels.
  const std::map<int, std::size_t> catalan = {{2, 1}, {3, 2}, {4, 5}, {5, 14}};
  for (auto [n, c] : catalan) {
    GrammarShape shape{2, 3, 4};
    std::size_t count = 0;
    for_each_tree(n, shape, [&](const LexTree& t) {
      t.validate(n, &shape);
      ++count;
    });
    std::size_t expected = c * (1u << (n - 1));
    for (int k = 0; k < n - 1; ++k) expected *= 2;
    for (int k = 0; k < n; ++k) expected *= 3;
    EXPECT_EQ(count, expected) << "n=" << n;
  }
  EXPECT_THROW(for_each_tree(9, GrammarShape{1, 1, 2}, [](const LexTree&) {}), ConfigError);
}

TEST(Chart, InsideAndViterbiMatchEnumeration) {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const int n = 2 + static_cast<int>(seed % 3);
    auto inst = random_instance(seed, n, 2, 2, 4, 0.7, 1.3, 3, seed % 2 ? Placement::Root : Placement::NonRoot);
    RuleScores scores(inst.grammar);
    auto sp = SentencePriors::bind(inst.priors, inst.sentence);
    auto summary = enumerate_summary(inst.sentence, scores, sp);
    auto in = inside(inst.sentence, scores, sp);
    auto best = viterbi(inst.sentence, scores, sp);
    EXPECT_NEAR(in.log_marginal, summary.log_sum, 1e-9) << "seed " << seed;
    EXPECT_NEAR(best.score, summary.max_score, 1e-9) << "seed " << seed;
    EXPECT_NEAR(tree_score(best.tree, inst.sentence, scores, sp), best.score, 1e-9);
  }
}

TEST(Chart, EnumeratedScoresAgreeWithTreeScore) {
  auto inst = random_instance(3, 3, 2, 2, 3, 1.0, 2.0, 2);
  RuleScores scores(inst.grammar);
  auto sp = SentencePriors::bind(inst.priors, inst.sentence);
  LogAccumulator acc;
  for (const auto& t : enumerate_trees(inst.sentence, scores, sp)) {
    EXPECT_NEAR(t.score, tree_score(t.tree, inst.sentence, scores, sp), 1e-12);
    acc.add(t.score);
  }
  EXPECT_NEAR(acc.value(), inside(inst.sentence, scores, sp).log_marginal, 1e-9);
}

// "dog dog" under the hand-written grammar: two trees, one per head.
TEST(Chart, TwoWordHandComputation) {
  auto g = LexGrammar::load(LEXINDUCE_TEST_DATA "/grammar_v1.json");
  auto s = sentence_of(g, {"dog", "dog"});
  const double e = 2.0 - std::log1p(std::exp(2.0));  // log p(dog | PT)
  const double left = std::log(0.5) + std::log(0.5) + 2 * e;
  const double right = std::log(1.0 / 6.0) + std::log(1.0 / 3.0) + 2 * e;
  auto none = PriorBundle{};
  EXPECT_NEAR(inside(s, g, none).log_marginal, std::log(std::exp(left) + std::exp(right)), 1e-12);
  auto best = viterbi(s, g, none);
  EXPECT_NEAR(best.score, left, 1e-12);
  EXPECT_EQ(best.tree.root_node().head, 0);

  LexTree t;
  int a = t.add_leaf(0, 1), b = t.add_leaf(1, 1);
  t.add_binary(0, Direction::Right, a, b);
  EXPECT_NEAR(tree_score(t, s, g, none), right, 1e-12);
}

TEST(Chart, PotentialsEnterTheTreeScore) {
  auto g = LexGrammar::load(LEXINDUCE_TEST_DATA "/grammar_v1.json");
  auto s = sentence_of(g, {"dog", "dog", "dog"});
  LexTree t;
  int a = t.add_leaf(0, 1), b = t.add_leaf(1, 1), c = t.add_leaf(2, 1);
  int ab = t.add_binary(0, Direction::Left, a, b);  // (0,1) head 0
  t.add_binary(0, Direction::Left, ab, c);           // (0,2) head 0
  const double base = tree_score(t, s, g, PriorBundle{});

  auto lex = std::make_shared<ConcretenessLexicon>();
  lex->insert_raw("dog", 4.5);
  auto spans = std::make_shared<RewardedSpanSet>();
  spans->add("s", {0, 1, 0});
  spans->add("s", {0, 2, 0});
  spans->add("s", {1, 2, 1});  // not a constituent of t
  PriorBundle p;
  p.lambda_c = 2.0;
  p.lambda_v = 0.5;
  p.lexicon = lex;
  p.spans = spans;
  EXPECT_NEAR(tree_score(t, s, g, p), base + 2.0 * 0.9 + 2 * 0.5, 1e-12);
  p.placement = Placement::Root;
  EXPECT_NEAR(tree_score(t, s, g, p), base + 2.0 * 0.9 + 0.5, 1e-12);
}

TEST(Chart, UniformGrammarTiesFollowTheDocumentedOrder) {
  GrammarConfig c;
  c.num_nonterminals = 2;
  c.num_preterminals = 2;
  auto g = LexGrammar::new_random(c, word_vocab(3));
  auto& x = g.mutable_logits();
  for (auto* t : {&x.root, &x.head, &x.dep, &x.emit}) std::fill(t->begin(), t->end(), 0.0);
  auto s = sentence_of(g, {"w1", "w2", "w1"});
  auto best = viterbi(s, g, PriorBundle{});
  const auto& root = best.tree.root_node();
  EXPECT_EQ(root.label, 0);
  EXPECT_EQ(root.head, 0);
  EXPECT_EQ(root.dir, Direction::Left);
  // lowest split: the left child is the single word at position 0
  const auto& left = best.tree.node(best.tree.left_child(root));
  EXPECT_EQ(left.end, 0);
  EXPECT_EQ(left.label, 2);
  auto again = viterbi(s, g, PriorBundle{});
  EXPECT_EQ(again.tree, best.tree);
}

// Reversing the sentence and swapping Left/Right in the grammar maps every
// tree to its mirror image with the same score.
TEST(Chart, MirrorSymmetry) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    auto g = random_grammar(seed, 2, 2, 4);
    auto m = g;
    const auto& s = g.shape();
    for (int a = 0; a < s.nonterminals; ++a)
      for (int w = 0; w < s.vocab; ++w)
        for (int b = 0; b < s.symbols(); ++b)
          std::swap(m.mutable_logits().head[s.head_index(a, w, Direction::Left, b)],
                    m.mutable_logits().head[s.head_index(a, w, Direction::Right, b)]);
    for (int a = 0; a < s.nonterminals; ++a)
      for (int b = 0; b < s.symbols(); ++b)
        for (int c = 0; c < s.symbols(); ++c)
          std::swap(m.mutable_logits().dep[s.dep_index(Direction::Left, a, b, c)],
                    m.mutable_logits().dep[s.dep_index(Direction::Right, a, b, c)]);
    std::mt19937_64 rng(seed);
    auto fwd = random_sentence(rng, 5, 4);
    Sentence rev = fwd;
    std::reverse(rev.token_ids.begin(), rev.token_ids.end());
    std::reverse(rev.surface.begin(), rev.surface.end());
    std::reverse(rev.lemmas.begin(), rev.lemmas.end());
    EXPECT_NEAR(inside(fwd, g, {}).log_marginal, inside(rev, m, {}).log_marginal, 1e-9);
    EXPECT_NEAR(viterbi(fwd, g, {}).score, viterbi(rev, m, {}).score, 1e-9);
  }
}

// A constant concreteness for every word shifts every tree by the same amount.
TEST(Chart, ConstantRootBonusShiftsTheMarginal) {
  auto g = random_grammar(9, 2, 2, 3);
  std::mt19937_64 rng(9);
  auto s = random_sentence(rng, 4, 3);
  auto lex = std::make_shared<ConcretenessLexicon>();
  for (const auto& w : {"<unk>", "w1", "w2"}) lex->insert_raw(w, 3.0);
  PriorBundle p;
  p.lambda_c = 1.7;
  p.lexicon = lex;
  EXPECT_NEAR(inside(s, g, p).log_marginal, inside(s, g, {}).log_marginal + 1.7 * 0.6, 1e-10);
  EXPECT_NEAR(viterbi(s, g, p).score, viterbi(s, g, {}).score + 1.7 * 0.6, 1e-10);
}

TEST(Chart, GradientMatchesFiniteDifferences) {
  const double eps = 1e-5;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    auto inst = random_instance(seed + 40, 3, 2, 2, 3, 0.8, 1.1, 2);
    auto grad = expected_counts(inst.sentence, inst.grammar, inst.priors);
    auto probe = [&](std::vector<double> GrammarTables::*table) {
      auto& xs = inst.grammar.mutable_logits().*table;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const double keep = xs[i];
        xs[i] = keep + eps;
        double up = inside(inst.sentence, inst.grammar, inst.priors).log_marginal;
        xs[i] = keep - eps;
        double down = inside(inst.sentence, inst.grammar, inst.priors).log_marginal;
        xs[i] = keep;
        const double fd = (up - down) / (2 * eps);
        EXPECT_LE(std::abs(fd - (grad.*table)[i]), 1e-4 * std::max(1.0, std::abs(fd))) << "index " << i;
      }
    };
    probe(&GrammarTables::root);
    probe(&GrammarTables::head);
    probe(&GrammarTables::dep);
    probe(&GrammarTables::emit);
  }
}

TEST(Chart, PosteriorCountsAreConsistent) {
  auto inst = random_instance(21, 5, 3, 2, 4, 1.0, 1.0, 3);
  RuleScores scores(inst.grammar);
  auto counts = posterior_counts(inst.sentence, scores, SentencePriors::bind(inst.priors, inst.sentence));
  double root = 0, head = 0, dep = 0, emit = 0;
  for (double v : counts.root) root += v;
  for (const auto& [w, v] : counts.head)
    for (double x : v) head += x;
  for (double v : counts.dep) dep += v;
  for (const auto& [w, v] : counts.emit)
    for (double x : v) emit += x;
  EXPECT_NEAR(root, 1.0, 1e-10);
  EXPECT_NEAR(head, 4.0, 1e-10);
  EXPECT_NEAR(dep, 4.0, 1e-10);
  EXPECT_NEAR(emit, 5.0, 1e-10);
}

TEST(Chart, PosteriorsMatchEnumeration) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    auto inst = random_instance(seed + 60, 4, 2, 2, 4, 1.2, 0.9, 3, seed % 2 ? Placement::Root : Placement::NonRoot);
    RuleScores scores(inst.grammar);
    auto sp = SentencePriors::bind(inst.priors, inst.sentence);
    auto trees = enumerate_trees(inst.sentence, scores, sp);
    LogAccumulator all;
    for (const auto& t : trees) all.add(t.score);
    for (int h = 0; h < 4; ++h) {
      LogAccumulator at;
      for (const auto& t : trees)
        if (t.tree.root_node().head == h) at.add(t.score);
      EXPECT_NEAR(posterior_root_head(inst.sentence, scores, sp, h), std::exp(at.value() - all.value()), 1e-9);
    }
    LogAccumulator hit;
    for (const auto& t : trees) {
      bool any = false;
      for (const auto& nd : t.tree.nodes()) any = any || sp.potential_applies(nd.start, nd.end, nd.head);
      if (any) hit.add(t.score);
    }
    const double expect = sp.rewarded.empty() ? 0.0 : std::exp(hit.value() - all.value());
    EXPECT_NEAR(posterior_any_rewarded(inst.sentence, scores, sp), expect, 1e-9) << "seed " << seed;
  }
}

TEST(Chart, InferencePriorsOffDecodesWithoutPotentials) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    auto inst = random_instance(seed + 80, 5, 2, 3, 4, 3.0, 3.0, 4);
    auto bare = inst.priors;
    bare.lambda_c = bare.lambda_v = 0.0;
    inst.priors.inference_priors_enabled = false;
    EXPECT_EQ(viterbi(inst.sentence, inst.grammar, inst.priors).tree,
              viterbi(inst.sentence, inst.grammar, bare).tree);
  }
}

TEST(Chart, RejectsBadInput) {
  auto g = random_grammar(1, 2, 2, 3);
  Sentence one;
  one.id = "x";
  one.token_ids = {1};
  one.surface = one.lemmas = {"w1"};
  EXPECT_ANY_THROW(inside(one, g, {}));
  Sentence oov = one;
  oov.token_ids = {1, 7};
  oov.surface = oov.lemmas = {"w1", "w7"};
  EXPECT_ANY_THROW(viterbi(oov, g, {}));

  std::mt19937_64 rng(1);
  auto s = random_sentence(rng, 3, 3);
  LexTree t;
  int a = t.add_leaf(0, 2), b = t.add_leaf(2, 2);
  t.add_binary(0, Direction::Left, a, b);
  EXPECT_THROW(tree_score(t, s, g, {}), StructureError);
  LexTree u;
  int c = u.add_leaf(0, 0), d = u.add_leaf(1, 2), e = u.add_leaf(2, 3);
  int cd = u.add_binary(1, Direction::Left, c, d);
  u.add_binary(0, Direction::Right, cd, e);
  EXPECT_THROW(tree_score(u, s, g, {}), StructureError);  // nonterminal on a leaf
}

TEST(Chart, ViterbiNeverExceedsTheMarginal) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto inst = random_instance(seed + 100, 6, 3, 3, 5, 1.0, 1.0, 3);
    EXPECT_LE(viterbi(inst.sentence, inst.grammar, inst.priors).score,
              inside(inst.sentence, inst.grammar, inst.priors).log_marginal + 1e-12);
  }
}
