#include <gtest/gtest.h>

#include <filesystem>

#include <json.hpp>

#include "lexinduce/corpus_io.hpp"
#include "lexinduce/error.hpp"
#include "lexinduce/planted.hpp"
#include "support.hpp"

using namespace lexinduce;

namespace {

struct Setup {
  PlantedData data;
  LexGrammar init;
};

Setup planted_setup(int train_size, std::uint64_t seed, int nt = 3, int pt = 5) {
  auto data = make_planted_data(sample_planted_corpus(train_size, seed, "t"), sample_planted_corpus(30, seed + 100, "v"));
  GrammarConfig gc;
  gc.num_nonterminals = nt;
  gc.num_preterminals = pt;
  gc.seed = seed;
  auto init = LexGrammar::new_random(gc, data.vocab);
  return {std::move(data), std::move(init)};
}

TrainConfig small_config() {
  TrainConfig c;
  c.epochs = 5;
  c.batch_size = 10;
  c.learning_rate = 0.01;
  return c;
}

}  // namespace

TEST(Training, ObjectiveIncreasesEachEpoch) {
  auto s = planted_setup(100, 0);
  auto r = train(s.data.train, s.init, {}, small_config());
  ASSERT_EQ(r.history.size(), 6u);
  for (std::size_t i = 1; i < r.history.size(); ++i)
    EXPECT_GT(r.history[i].objective, r.history[i - 1].objective) << "epoch " << i;
}

TEST(Training, FullBatchAscentIsMonotone) {
  auto s = planted_setup(40, 1);
  TrainConfig c;
  c.epochs = 10;
  c.batch_size = 40;
  c.learning_rate = 0.005;
  c.eval_every = 1;
  auto r = train(s.data.train, s.init, {}, c);
  ASSERT_EQ(r.history.size(), 11u);
  for (std::size_t i = 1; i < r.history.size(); ++i) EXPECT_GE(r.history[i].objective, r.history[i - 1].objective);
}

TEST(Training, ZeroLearningRateFreezesTheGrammar) {
  auto s = planted_setup(30, 2);
  auto c = small_config();
  c.learning_rate = 0.0;
  auto r = train(s.data.train, s.init, {}, c);
  EXPECT_EQ(r.best.logits(), s.init.logits());
  for (const auto& h : r.history) EXPECT_EQ(h.objective, r.history.front().objective);
}

TEST(Training, SameSeedSameHistory) {
  auto s = planted_setup(50, 3);
  auto c = small_config();
  c.epochs = 2;
  c.seed = 9;
  auto a = train(s.data.train, s.init, {}, c, &s.data.valid);
  auto b = train(s.data.train, s.init, {}, c, &s.data.valid);
  EXPECT_EQ(a.history, b.history);
  EXPECT_EQ(a.best.logits(), b.best.logits());
}

TEST(Training, SelectionMaximizesValidationF1) {
  auto s = planted_setup(60, 4);
  auto c = small_config();
  c.learning_rate = 0.1;
  c.eval_every = 2;
  auto r = train(s.data.train, s.init, {}, c, &s.data.valid);
  for (const auto& h : r.history) EXPECT_GE(r.history[r.best_index].corpus_f1, h.corpus_f1);
  auto check = evaluate_grammar(r.best, {}, s.data.valid);
  EXPECT_EQ(check.corpus_f1, r.history[r.best_index].corpus_f1);
}

TEST(Training, LongSentencesAreFilteredAndEmptyCorpusRejected) {
  auto s = planted_setup(30, 5);
  auto c = small_config();
  c.max_sentence_length = 2;
  std::vector<Sentence> only_long;
  for (const auto& x : s.data.train)
    if (x.size() > 2) only_long.push_back(x);
  EXPECT_THROW(train(only_long, s.init, {}, c), InputError);
  c.epochs = 0;
  EXPECT_THROW(train(s.data.train, s.init, {}, c), ConfigError);
}

TEST(Training, DivergenceIsReported) {
  auto s = planted_setup(20, 6);
  auto c = small_config();
  c.learning_rate = 1e306;
  EXPECT_THROW(train(s.data.train, s.init, {}, c), NumericError);
}

TEST(Training, CheckpointFiles) {
  auto s = planted_setup(20, 7);
  auto c = small_config();
  c.epochs = 2;
  c.checkpoint_dir = testing::TempDir() + "ckpt_test";
  std::filesystem::remove_all(c.checkpoint_dir);
  auto r = train(s.data.train, s.init, {}, c, &s.data.valid);
  const auto& last = r.history.back();
  auto reloaded = LexGrammar::load(last.path);
  EXPECT_EQ(reloaded.vocab(), s.init.vocab());
  auto meta = nlohmann::json::parse(read_text(last.path.substr(0, last.path.size() - 5) + ".metrics.json"));
  EXPECT_EQ(meta.at("epoch").get<int>(), 2);
  auto log = read_text(c.checkpoint_dir + "/train_log.csv");
  EXPECT_EQ(log.rfind("epoch,batch,objective,corpus_f1,sentence_f1,das,uas\n", 0), 0u);
  EXPECT_EQ(std::count(log.begin(), log.end(), '\n'), 4);
}

TEST(Training, EmissionSmoothingGradient) {
  auto g = testing_support::random_grammar(3, 2, 2, 4);
  auto value = [&](const LexGrammar& x) {
    auto lp = x.log_probs();
    double v = 0;
    for (double e : lp.emit) v += e;
    return 0.7 * v;
  };
  GrammarTables grad(g.shape());
  add_emission_smoothing(g.log_probs(), 0.7, 1.0, grad);
  for (std::size_t i = 0; i < grad.emit.size(); ++i) {
    auto up = g, down = g;
    up.mutable_logits().emit[i] += 1e-5;
    down.mutable_logits().emit[i] -= 1e-5;
    EXPECT_NEAR((value(up) - value(down)) / 2e-5, grad.emit[i], 1e-6);
  }
}

TEST(Planted, DegenerateCorpusRecoversEveryAttachment) {
  auto data = make_planted_data(sample_planted_corpus(40, 1, "t", true), sample_planted_corpus(20, 2, "v", true));
  GrammarConfig gc;
  gc.num_nonterminals = 2;
  gc.num_preterminals = 2;
  auto init = LexGrammar::new_random(gc, data.vocab);
  PriorBundle p;
  p.lexicon = std::make_shared<ConcretenessLexicon>(data.lexicon);
  auto c = small_config();
  c.lambda_c = 5.0;
  c.learning_rate = 0.1;
  auto r = train(data.train, init, p, c, &data.valid);
  EXPECT_EQ(r.history[r.best_index].das, 1.0);
  EXPECT_EQ(r.history[r.best_index].uas, 1.0);
}

TEST(Planted, ReportSchema) {
  PlantedConfig pc;
  pc.num_seeds = 1;
  pc.train_sentences = 20;
  pc.valid_sentences = 10;
  pc.epochs = 1;
  auto report = planted_grammar_experiment(pc);
  auto j = nlohmann::ordered_json::parse(report.to_json());
  ASSERT_EQ(j.at("conditions").size(), 2u);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j["conditions"][0].items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"condition", "lambda_c", "epoch", "batch", "objective", "corpus_f1",
                                            "sentence_f1", "das", "uas", "path"}));
  EXPECT_EQ(j["conditions"][0]["condition"], "baseline");
  EXPECT_EQ(j["conditions"][1]["lambda_c"], 1.3);
  EXPECT_EQ(j.at("runs").size(), 2u);
  EXPECT_NE(report.to_table().find("concreteness"), std::string::npos);
}

TEST(Planted, GoldTreesAreWellFormed) {
  auto c = sample_planted_corpus(50, 11);
  for (const auto& s : c.sentences) {
    s.tree.validate(static_cast<int>(s.tokens.size()));
    auto deps = extract_dependencies(s.tree);
    EXPECT_TRUE(deps.is_tree());
    EXPECT_EQ(s.tags[static_cast<std::size_t>(deps.root_position())], "NOUN");
    auto parsed = parse_bracketed(gold_bracketed(s));
    EXPECT_EQ(parsed.tokens, s.tokens);
    EXPECT_EQ(parsed.spans, extract_spans(s.tree, false));
  }
}
