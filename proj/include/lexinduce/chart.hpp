#pragma once

#include <map>
#include <vector>

#include "lexinduce/grammar.hpp"
#include "lexinduce/priors.hpp"
#include "lexinduce/tree.hpp"

namespace lexinduce {

// Normalized log-probability tables for one grammar snapshot. Building this
// once per batch keeps the softmax out of the per-sentence work.
class RuleScores {
 public:
  explicit RuleScores(const LexGrammar& grammar) : tables_(grammar.log_probs()) {}
  explicit RuleScores(GrammarTables log_probs) : tables_(std::move(log_probs)) {}

  const GrammarTables& tables() const { return tables_; }
  const GrammarShape& shape() const { return tables_.shape; }

 private:
  GrammarTables tables_;
};

// Per-sentence table over (i <= j, head h in [i, j], label). Width-1 cells
// carry preterminal labels, wider cells nonterminal labels; everything else
// stays at -inf.
class Chart {
 public:
  Chart() = default;
  Chart(int length, int symbols);

  int length() const { return n_; }
  int symbols() const { return symbols_; }

  double inside(int i, int j, int h, Symbol x) const { return inside_[cell(i, j, h) + x]; }
  double head_marginal(int i, int j, Symbol x) const { return marginal_[span(i, j) + x]; }

  double& inside_ref(int i, int j, int h, Symbol x) { return inside_[cell(i, j, h) + x]; }
  double& marginal_ref(int i, int j, Symbol x) { return marginal_[span(i, j) + x]; }

 private:
  std::size_t cell(int i, int j, int h) const {
    return ((static_cast<std::size_t>(i) * n_ + j) * n_ + h) * symbols_;
  }
  std::size_t span(int i, int j) const { return (static_cast<std::size_t>(i) * n_ + j) * symbols_; }

  int n_ = 0;
  int symbols_ = 0;
  std::vector<double> inside_;
  std::vector<double> marginal_;
};

struct InsideResult {
  double log_marginal = 0.0;
  Chart chart;
};

// log sum over all binary head-annotated trees of exp(tree_score).
InsideResult inside(const Sentence& sentence, const RuleScores& scores, const SentencePriors& priors);
InsideResult inside(const Sentence& sentence, const LexGrammar& grammar, const PriorBundle& priors);

struct ViterbiResult {
  LexTree tree;
  double score = 0.0;
};

// Ties prefer the lower split point, then Left, then lower symbol ids.
ViterbiResult viterbi(const Sentence& sentence, const RuleScores& scores, const SentencePriors& priors);
// Uses priors.for_decoding(), so inference_priors_enabled = false decodes
// with both weights at zero.
ViterbiResult viterbi(const Sentence& sentence, const LexGrammar& grammar, const PriorBundle& priors);

// Sum of rule log-probabilities plus the root and span potentials.
// Throws StructureError for malformed trees.
double tree_score(const LexTree& tree, const Sentence& sentence, const RuleScores& scores,
                  const SentencePriors& priors);
double tree_score(const LexTree& tree, const Sentence& sentence, const LexGrammar& grammar,
                  const PriorBundle& priors);

// Same sum without validation; `tree` must already be well formed.
double tree_score_unchecked(const LexTree& tree, const Sentence& sentence, const GrammarTables& log_probs,
                            const SentencePriors& priors);

// Posterior expected rule counts of one sentence. Head and emission counts
// are sparse over the words that occur in the sentence.
struct ExpectedCounts {
  GrammarShape shape;
  double log_marginal = 0.0;
  std::vector<double> root;                      // [A]
  std::map<WordId, std::vector<double>> head;    // w -> [A][dir][B]
  std::vector<double> dep;                       // [dir][A][B][C]
  std::map<WordId, std::vector<double>> emit;    // w -> [T - N]

  ExpectedCounts() = default;
  explicit ExpectedCounts(const GrammarShape& s);
  void add(const ExpectedCounts& other);
};

ExpectedCounts posterior_counts(const Sentence& sentence, const RuleScores& scores,
                                const SentencePriors& priors);

// grad += d log_marginal / d logits, via count - p * total per context.
void accumulate_gradient(const ExpectedCounts& counts, const GrammarTables& log_probs, GrammarTables& grad);

// Dense gradient of log_marginal with respect to every logit.
GrammarTables expected_counts(const Sentence& sentence, const LexGrammar& grammar, const PriorBundle& priors);

// P(sentence head = position) under the tree posterior.
double posterior_root_head(const Sentence& sentence, const RuleScores& scores, const SentencePriors& priors,
                           int position);
// P(at least one constituent receives the span potential).
double posterior_any_rewarded(const Sentence& sentence, const RuleScores& scores,
                              const SentencePriors& priors);

}  // namespace lexinduce
