#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "lexinduce/chart.hpp"
#include "lexinduce/grammar.hpp"
#include "lexinduce/priors.hpp"

namespace testing_support {

using namespace lexinduce;

inline Vocabulary word_vocab(int v) {
  std::vector<std::string> words;
  for (int i = 1; i < v; ++i) words.push_back("w" + std::to_string(i));
  return Vocabulary(words);  // UNK plus v - 1 words
}

inline LexGrammar random_grammar(std::uint64_t seed, int nt, int pt, int v, double scale = 1.0) {
  GrammarConfig c;
  c.num_nonterminals = nt;
  c.num_preterminals = pt;
  c.seed = seed;
  auto g = LexGrammar::new_random(c, word_vocab(v));
  // N(0, 0.1) is close to uniform; widen it so ties are unlikely.
  for (auto* t : {&g.mutable_logits().root, &g.mutable_logits().head, &g.mutable_logits().dep,
                  &g.mutable_logits().emit})
    for (double& x : *t) x *= 10.0 * scale;
  return g;
}

inline Sentence random_sentence(std::mt19937_64& rng, int n, int v, const std::string& id = "s") {
  std::uniform_int_distribution<int> word(0, v - 1);
  Sentence s;
  s.id = id;
  for (int i = 0; i < n; ++i) {
    int w = word(rng);
    s.token_ids.push_back(w);
    s.surface.push_back(w == 0 ? "<unk>" : "w" + std::to_string(w));
    s.lemmas.push_back(s.surface.back());
  }
  return s;
}

struct Instance {
  LexGrammar grammar;
  Sentence sentence;
  PriorBundle priors;
};

// Random grammar, sentence, lexicon and rewarded spans, all from `seed`.
inline Instance random_instance(std::uint64_t seed, int n, int nt, int pt, int v, double lambda_c, double lambda_v,
                                int num_spans, Placement placement = Placement::NonRoot) {
  std::mt19937_64 rng(seed * 7919 + 13);
  Instance inst{random_grammar(seed, nt, pt, v), random_sentence(rng, n, v), {}};
  auto lex = std::make_shared<ConcretenessLexicon>();
  std::uniform_real_distribution<double> raw(1.0, 5.0);
  for (int w = 1; w < v; ++w)
    if (std::bernoulli_distribution(0.8)(rng)) lex->insert_raw("w" + std::to_string(w), raw(rng));
  auto spans = std::make_shared<RewardedSpanSet>();
  spans->ensure(inst.sentence.id);
  std::uniform_int_distribution<int> pos(0, n - 1);
  for (int k = 0; k < num_spans; ++k) {
    int a = pos(rng), b = pos(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    spans->add(inst.sentence.id, {a, b, std::bernoulli_distribution(0.5)(rng) ? a : b});
  }
  inst.priors.lambda_c = lambda_c;
  inst.priors.lambda_v = lambda_v;
  inst.priors.lexicon = lex;
  inst.priors.spans = spans;
  inst.priors.placement = placement;
  return inst;
}

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace testing_support
