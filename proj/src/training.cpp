#include "lexinduce/training.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include <json.hpp>

#include "lexinduce/corpus_kernels.hpp"
#include "lexinduce/error.hpp"

namespace lexinduce {

namespace fs = std::filesystem;

void TrainConfig::validate() const {
  if (epochs <= 0) throw ConfigError("epochs must be positive");
  if (batch_size <= 0) throw ConfigError("batch size must be positive");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    throw ConfigError("learning rate must be finite and non-negative");
  if (!(lambda_c >= 0.0) || !(lambda_v >= 0.0)) throw ConfigError("prior weights must be non-negative");
  if (max_sentence_length < 2) throw ConfigError("max sentence length must be at least 2");
  if (eval_every < 0) throw ConfigError("eval_every must be non-negative");
}

void ValidationSet::validate() const {
  if (gold_spans.size() != sentences.size() || gold_deps.size() != sentences.size())
    throw InputError("validation set: gold annotations do not cover every sentence");
  for (std::size_t i = 0; i < sentences.size(); ++i)
    if (gold_deps[i].size() != sentences[i].size())
      throw InputError("validation set: dependency length mismatch for " + sentences[i].id);
}

double corpus_objective(const std::vector<const Sentence*>& sentences, const RuleScores& scores,
                        const PriorBundle& priors) {
  auto lm = log_marginals_parallel(sentences, scores, priors);
  double total = 0.0;
  for (double v : lm) total += v;
  return total;
}

EvalReport evaluate_grammar(const LexGrammar& grammar, const PriorBundle& priors, const ValidationSet& validation) {
  RuleScores scores(grammar);
  auto results = viterbi_parallel(pointers(validation.sentences), scores, priors);
  std::vector<SpanSet> pred_spans;
  std::vector<DependencyParse> pred_deps;
  for (const auto& r : results) {
    pred_spans.push_back(extract_spans(r.tree));
    pred_deps.push_back(extract_dependencies(r.tree));
  }
  return evaluate(validation.gold_spans, pred_spans, validation.gold_deps, pred_deps);
}

void add_emission_smoothing(const GrammarTables& log_probs, double smoothing, double weight, GrammarTables& grad) {
  if (smoothing == 0.0 || weight == 0.0) return;
  const auto& sh = log_probs.shape;
  const double scale = smoothing * weight;
  for (Symbol t = sh.nonterminals; t < sh.symbols(); ++t)
    for (WordId w = 0; w < sh.vocab; ++w) {
      auto k = sh.emit_index(t, w);
      grad.emit[k] += scale * (1.0 - sh.vocab * std::exp(log_probs.emit[k]));
    }
}

namespace {

bool all_finite(const GrammarTables& t) {
  for (const auto* v : {&t.root, &t.head, &t.dep, &t.emit})
    for (double x : *v)
      if (!std::isfinite(x)) return false;
  return true;
}

void write_checkpoint(const LexGrammar& grammar, const CheckpointMeta& meta) {
  std::ofstream g(meta.path, std::ios::binary);
  if (!g) throw InputError("cannot write checkpoint " + meta.path);
  g << grammar.to_json();
  nlohmann::ordered_json j;
  j["epoch"] = meta.epoch;
  j["batch"] = meta.batch;
  j["objective"] = meta.objective;
  j["corpus_f1"] = meta.corpus_f1;
  j["sentence_f1"] = meta.sentence_f1;
  j["das"] = meta.das;
  j["uas"] = meta.uas;
  j["path"] = fs::path(meta.path).filename().string();
  std::ofstream m(meta.path.substr(0, meta.path.size() - 5) + ".metrics.json", std::ios::binary);
  m << j.dump(2) << '\n';
}

}  // namespace

TrainResult train(const std::vector<Sentence>& corpus, const LexGrammar& init, const PriorBundle& priors_in,
                  const TrainConfig& config, const ValidationSet* validation,
                  const std::function<void(const CheckpointMeta&)>& on_checkpoint) {
  config.validate();
  PriorBundle priors = priors_in;
  priors.lambda_c = config.lambda_c;
  priors.lambda_v = config.lambda_v;
  priors.placement = config.placement;
  priors.validate();
  if (validation && validation->empty()) validation = nullptr;
  if (validation) validation->validate();

  std::vector<const Sentence*> train_set;
  for (const auto& s : corpus)
    if (s.size() >= 2 && s.size() <= config.max_sentence_length) train_set.push_back(&s);
  if (train_set.empty())
    throw InputError("no training sentences of length 2.." + std::to_string(config.max_sentence_length));
  for (const auto* s : train_set) s->validate(init.shape().vocab);

  std::ofstream log;
  if (!config.checkpoint_dir.empty()) {
    fs::create_directories(config.checkpoint_dir);
    log.open(fs::path(config.checkpoint_dir) / "train_log.csv", std::ios::binary);
    if (!log) throw InputError("cannot write training log in " + config.checkpoint_dir);
    log << "epoch,batch,objective,corpus_f1,sentence_f1,das,uas\n";
    log.precision(17);
  }

  LexGrammar grammar = init;
  TrainResult result{init, 0, {}};

  auto checkpoint = [&](int epoch, int batch) {
    RuleScores scores(grammar);
    CheckpointMeta meta;
    meta.epoch = epoch;
    meta.batch = batch;
    meta.objective = corpus_objective(train_set, scores, priors);
    if (!std::isfinite(meta.objective))
      throw NumericError("training objective became non-finite at epoch " + std::to_string(epoch) +
                         ", batch " + std::to_string(batch) + "; the learning rate is probably too high");
    if (validation) {
      auto r = evaluate_grammar(grammar, priors, *validation);
      meta.corpus_f1 = r.corpus_f1;
      meta.sentence_f1 = r.sentence_f1;
      meta.das = r.das;
      meta.uas = r.uas;
    }
    if (!config.checkpoint_dir.empty()) {
      meta.path = (fs::path(config.checkpoint_dir) /
                   ("ckpt_e" + std::to_string(epoch) + "_b" + std::to_string(batch) + ".json"))
                      .string();
      write_checkpoint(grammar, meta);
      log << meta.epoch << ',' << meta.batch << ',' << meta.objective << ',' << meta.corpus_f1 << ','
          << meta.sentence_f1 << ',' << meta.das << ',' << meta.uas << '\n';
      log.flush();
    }
    result.history.push_back(meta);
    if (result.history.size() > 1) {
      const auto& cur = result.history[result.best_index];
      if (validation ? meta.corpus_f1 > cur.corpus_f1 : meta.objective > cur.objective) {
        result.best_index = result.history.size() - 1;
        result.best = grammar;
      }
    }
    if (on_checkpoint) on_checkpoint(meta);
  };

  checkpoint(0, 0);

  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const double smoothing = grammar.config().emission_smoothing;
  int updates = 0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    bool fresh = false;
    for (std::size_t b = 0; b < order.size(); b += static_cast<std::size_t>(config.batch_size)) {
      std::vector<std::size_t> ids(order.begin() + static_cast<std::ptrdiff_t>(b),
                                   order.begin() + static_cast<std::ptrdiff_t>(
                                                       std::min(order.size(), b + config.batch_size)));
      std::sort(ids.begin(), ids.end());
      std::vector<const Sentence*> batch;
      for (auto i : ids) batch.push_back(train_set[i]);

      RuleScores scores(grammar);
      auto counts = batch_counts_parallel(batch, scores, priors);
      if (!std::isfinite(counts.log_marginal))
        throw NumericError("non-finite batch objective at epoch " + std::to_string(epoch) +
                           "; the learning rate is probably too high");
      GrammarTables grad(grammar.shape());
      accumulate_gradient(counts, scores.tables(), grad);
      add_emission_smoothing(scores.tables(), smoothing,
                             static_cast<double>(batch.size()) / train_set.size(), grad);
      grammar.mutable_logits().axpy(config.learning_rate, grad);
      if (!all_finite(grammar.logits()))
        throw NumericError("logits became non-finite at epoch " + std::to_string(epoch) +
                           "; the learning rate is probably too high");
      ++updates;
      fresh = false;
      if (config.eval_every > 0 && updates % config.eval_every == 0) {
        checkpoint(epoch, updates);
        fresh = true;
      }
    }
    if (!fresh) checkpoint(epoch, updates);
  }

  return result;
}

}  // namespace lexinduce
