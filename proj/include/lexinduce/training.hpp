#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lexinduce/chart.hpp"
#include "lexinduce/evaluation.hpp"

namespace lexinduce {

struct TrainConfig {
  int epochs = 10;
  int batch_size = 16;
  double learning_rate = 0.05;
  // These override the weights and placement of the PriorBundle handed to
  // train(); the bundle only contributes its resources.
  double lambda_c = 0.0;
  double lambda_v = 0.0;
  Placement placement = Placement::NonRoot;
  std::uint64_t seed = 0;
  int max_sentence_length = 20;
  std::string checkpoint_dir;  // empty: keep checkpoints in memory only
  int eval_every = 0;          // batches; 0 means once per epoch

  // learning_rate == 0 is accepted (a frozen run is a useful baseline).
  void validate() const;
};

struct CheckpointMeta {
  int epoch = 0;
  int batch = 0;  // updates taken so far
  double objective = 0.0;
  double corpus_f1 = 0.0;
  double sentence_f1 = 0.0;
  double das = 0.0;
  double uas = 0.0;
  std::string path;

  bool operator==(const CheckpointMeta&) const = default;
};

struct ValidationSet {
  std::vector<Sentence> sentences;
  std::vector<SpanSet> gold_spans;  // trivial spans already removed
  std::vector<DependencyParse> gold_deps;

  bool empty() const { return sentences.empty(); }
  void validate() const;
};

struct TrainResult {
  LexGrammar best;
  std::size_t best_index = 0;
  std::vector<CheckpointMeta> history;  // history[0] is the initial grammar
};

// Sum of log marginals (priors included) over the sentences.
double corpus_objective(const std::vector<const Sentence*>& sentences, const RuleScores& scores,
                        const PriorBundle& priors);

// Viterbi-decodes the validation set under priors.for_decoding() and scores it.
EvalReport evaluate_grammar(const LexGrammar& grammar, const PriorBundle& priors, const ValidationSet& validation);

// Adds d/dlogits of smoothing * sum_T sum_w log p(w | T), scaled by `weight`.
void add_emission_smoothing(const GrammarTables& log_probs, double smoothing, double weight, GrammarTables& grad);

// Mini-batch gradient ascent on the corpus objective. The checkpoint with the
// best validation corpus F1 is returned (first one on ties); without a
// validation set the best objective wins instead.
TrainResult train(const std::vector<Sentence>& corpus, const LexGrammar& init, const PriorBundle& priors,
                  const TrainConfig& config, const ValidationSet* validation = nullptr,
                  const std::function<void(const CheckpointMeta&)>& on_checkpoint = {});

}  // namespace lexinduce
