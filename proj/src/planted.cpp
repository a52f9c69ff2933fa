#include "lexinduce/planted.hpp"

#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include <json.hpp>

#include "lexinduce/error.hpp"

namespace lexinduce {

namespace {

struct Word {
  const char* token;
  const char* lemma;
  double raw;
};

// Synthetic ratings on the usual 1..5 scale.
const std::vector<Word> kDet = {{"a", "a", 1.46}, {"the", "the", 1.43}};
const std::vector<Word> kAdj = {{"red", "red", 3.3},     {"small", "small", 2.6}, {"large", "large", 2.7},
                                {"white", "white", 3.4}, {"wooden", "wooden", 3.5}, {"young", "young", 2.8}};
const std::vector<Word> kNoun = {
    {"dog", "dog", 4.85},       {"cat", "cat", 4.86},     {"man", "man", 4.79},     {"woman", "woman", 4.46},
    {"table", "table", 4.93},   {"horse", "horse", 5.0},  {"bus", "bus", 4.93},     {"plate", "plate", 4.9},
    {"pizza", "pizza", 4.97},   {"bench", "bench", 4.9},  {"girl", "girl", 4.85},   {"boy", "boy", 4.79},
    {"street", "street", 4.71}, {"field", "field", 4.5},  {"fans", "fan", 4.71},    {"basketball", "basketball", 4.97},
    {"game", "game", 4.5},      {"kitchen", "kitchen", 4.9}};
const std::vector<Word> kVerb = {{"eating", "eat", 3.6},     {"riding", "ride", 3.55},  {"holding", "hold", 3.3},
                                 {"watching", "watch", 3.3}, {"playing", "play", 3.2}, {"carrying", "carry", 3.4}};
const std::vector<Word> kPrep = {{"on", "on", 3.2}, {"in", "in", 3.0}, {"near", "near", 2.6}, {"under", "under", 3.1}};
const std::vector<std::string> kSceneActivities = {"sit", "stand", "display"};

// L(x,y): the left child passes its head up; R(x,y): the right one does.
const std::vector<std::string> kTemplates = {
    "R(D,N)",
    "R(D,R(A,N))",
    "L(R(D,N),R(P,R(D,N)))",
    "L(R(D,N),L(V,R(D,N)))",
    "L(R(D,R(A,N)),R(P,R(D,N)))",
    "L(R(D,N),L(V,R(P,R(D,N))))",
    "L(R(D,N),L(V,R(D,R(A,N))))",
};

const char* tag_of(char c) {
  switch (c) {
    case 'D': return "DET";
    case 'A': return "ADJ";
    case 'N': return "NOUN";
    case 'V': return "VERB";
    default: return "ADP";
  }
}

const std::vector<Word>& words_of(char c) {
  switch (c) {
    case 'D': return kDet;
    case 'A': return kAdj;
    case 'N': return kNoun;
    case 'V': return kVerb;
    default: return kPrep;
  }
}

PlantedSentence realize(const std::string& tmpl, std::mt19937_64& rng, std::string id) {
  PlantedSentence s;
  s.id = std::move(id);
  std::size_t pos = 0;
  std::function<int()> build = [&]() -> int {
    char c = tmpl[pos];
    if (c == 'L' || c == 'R') {
      pos += 2;  // "X("
      int left = build();
      ++pos;  // ','
      int right = build();
      ++pos;  // ')'
      return s.tree.add_binary(0, c == 'L' ? Direction::Left : Direction::Right, left, right);
    }
    ++pos;
    const auto& pool = words_of(c);
    const Word& w = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
    int at = static_cast<int>(s.tokens.size());
    s.tokens.push_back(w.token);
    s.lemmas.push_back(w.lemma);
    s.tags.push_back(tag_of(c));
    return s.tree.add_leaf(at, 1);
  };
  build();

  s.labels.sentence_id = s.id;
  std::vector<std::string> nouns;
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    if (s.tags[i] == "VERB") s.labels.activity = s.lemmas[i];
    if (s.tags[i] == "NOUN") nouns.push_back(s.lemmas[i]);
  }
  if (s.labels.activity.empty())
    s.labels.activity = kSceneActivities[std::uniform_int_distribution<std::size_t>(0, 2)(rng)];
  s.labels.participants = nouns;
  if (std::bernoulli_distribution(0.3)(rng))
    s.labels.participants.push_back(kNoun[std::uniform_int_distribution<std::size_t>(0, kNoun.size() - 1)(rng)].lemma);
  return s;
}

nlohmann::ordered_json row_json(const PlantedRow& r, bool with_seed) {
  nlohmann::ordered_json j;
  j["condition"] = r.condition;
  j["lambda_c"] = r.lambda_c;
  if (with_seed) j["seed"] = r.seed;
  j["epoch"] = r.meta.epoch;
  j["batch"] = r.meta.batch;
  j["objective"] = r.meta.objective;
  j["corpus_f1"] = r.meta.corpus_f1;
  j["sentence_f1"] = r.meta.sentence_f1;
  j["das"] = r.meta.das;
  j["uas"] = r.meta.uas;
  j["path"] = r.meta.path;
  return j;
}

}  // namespace

ConcretenessLexicon PlantedCorpus::lexicon(NormalizationMode mode) const {
  ConcretenessLexicon lex(mode);
  for (const auto& [lemma, raw] : ratings) lex.insert_raw(lemma, raw);
  return lex;
}

PlantedCorpus sample_planted_corpus(int num_sentences, std::uint64_t seed, const std::string& id_prefix,
                                    bool degenerate) {
  if (num_sentences <= 0) throw ConfigError("planted corpus needs at least one sentence");
  PlantedCorpus c;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, kTemplates.size() - 1);
  for (int i = 0; i < num_sentences; ++i) {
    const std::string& t = degenerate ? kTemplates[0] : kTemplates[pick(rng)];
    c.sentences.push_back(realize(t, rng, id_prefix + std::to_string(i)));
  }
  for (const auto* pool : {&kDet, &kAdj, &kNoun, &kVerb, &kPrep})
    for (const auto& w : *pool) c.ratings.emplace_back(w.lemma, w.raw);
  return c;
}

std::string gold_bracketed(const PlantedSentence& s) {
  std::function<std::string(int)> emit = [&](int i) -> std::string {
    const TreeNode& n = s.tree.node(i);
    const std::string& tag = s.tags[static_cast<std::size_t>(n.head)];
    if (n.is_leaf()) return "(" + tag + " " + s.tokens[static_cast<std::size_t>(n.start)] + ")";
    return "(" + tag + " " + emit(s.tree.left_child(n)) + " " + emit(s.tree.right_child(n)) + ")";
  };
  return emit(s.tree.root());
}

void PlantedConfig::validate() const {
  if (num_seeds < 1) throw ConfigError("planted experiment needs at least one seed");
  if (train_sentences < 1 || valid_sentences < 1) throw ConfigError("planted corpus sizes must be positive");
  if (!(lambda_c > 0.0)) throw ConfigError("planted experiment compares against a positive lambda_c");
}

PlantedData make_planted_data(const PlantedCorpus& train, const PlantedCorpus& valid) {
  PlantedData d;
  std::vector<std::vector<std::string>> tokens;
  for (const auto& s : train.sentences) tokens.push_back(s.tokens);
  d.vocab = Vocabulary::build(tokens, 1);
  for (const auto& s : train.sentences) d.train.push_back(Sentence::from_tokens(s.id, s.tokens, s.lemmas, d.vocab));
  for (const auto& s : valid.sentences) {
    d.valid.sentences.push_back(Sentence::from_tokens(s.id, s.tokens, s.lemmas, d.vocab));
    d.valid.gold_spans.push_back(extract_spans(s.tree));
    d.valid.gold_deps.push_back(extract_dependencies(s.tree));
  }
  d.lexicon = train.lexicon();
  return d;
}

PlantedReport planted_grammar_experiment(const PlantedConfig& config) {
  config.validate();
  PlantedReport report;
  const std::vector<std::pair<std::string, double>> conditions = {{"baseline", 0.0},
                                                                    {"concreteness", config.lambda_c}};
  std::vector<CheckpointMeta> sums(conditions.size());

  for (int k = 0; k < config.num_seeds; ++k) {
    const std::uint64_t seed = config.base_seed + static_cast<std::uint64_t>(k);
    auto data = make_planted_data(sample_planted_corpus(config.train_sentences, seed * 2, "t"),
                                  sample_planted_corpus(config.valid_sentences, seed * 2 + 1, "v"));
    GrammarConfig gc;
    gc.num_nonterminals = config.nonterminals;
    gc.num_preterminals = config.preterminals;
    gc.seed = seed;
    auto init = LexGrammar::new_random(gc, data.vocab);

    PriorBundle priors;
    priors.lexicon = std::make_shared<ConcretenessLexicon>(data.lexicon);

    for (std::size_t c = 0; c < conditions.size(); ++c) {
      TrainConfig tc;
      tc.epochs = config.epochs;
      tc.batch_size = config.batch_size;
      tc.learning_rate = config.learning_rate;
      tc.lambda_c = conditions[c].second;
      tc.seed = seed;
      auto result = train(data.train, init, priors, tc, &data.valid);

      PlantedRow row{conditions[c].first, conditions[c].second, seed, result.history[result.best_index]};
      report.runs.push_back(row);
      report.initial_objectives.push_back(result.history.front().objective);
      report.final_objectives.push_back(result.history.back().objective);

      auto& s = sums[c];
      s.epoch += row.meta.epoch;
      s.batch += row.meta.batch;
      s.objective += row.meta.objective;
      s.corpus_f1 += row.meta.corpus_f1;
      s.sentence_f1 += row.meta.sentence_f1;
      s.das += row.meta.das;
      s.uas += row.meta.uas;
    }
  }

  const double n = config.num_seeds;
  for (std::size_t c = 0; c < conditions.size(); ++c) {
    CheckpointMeta m;
    m.epoch = static_cast<int>(sums[c].epoch / n);
    m.batch = static_cast<int>(sums[c].batch / n);
    m.objective = sums[c].objective / n;
    m.corpus_f1 = sums[c].corpus_f1 / n;
    m.sentence_f1 = sums[c].sentence_f1 / n;
    m.das = sums[c].das / n;
    m.uas = sums[c].uas / n;
    report.conditions.push_back({conditions[c].first, conditions[c].second, 0, m});
  }
  return report;
}

bool PlantedReport::objective_improved_everywhere() const {
  for (std::size_t i = 0; i < runs.size(); ++i)
    if (!(final_objectives[i] > initial_objectives[i])) return false;
  return !runs.empty();
}

double PlantedReport::das_gain() const {
  if (conditions.size() != 2) throw Error("planted report needs two conditions");
  return conditions[1].meta.das - conditions[0].meta.das;
}

std::string PlantedReport::to_json() const {
  nlohmann::ordered_json j;
  j["conditions"] = nlohmann::ordered_json::array();
  for (const auto& r : conditions) j["conditions"].push_back(row_json(r, false));
  j["runs"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    auto r = row_json(runs[i], true);
    r["initial_objective"] = initial_objectives[i];
    r["final_objective"] = final_objectives[i];
    j["runs"].push_back(r);
  }
  j["das_gain"] = das_gain();
  j["objective_improved_everywhere"] = objective_improved_everywhere();
  return j.dump(2) + "\n";
}

std::string PlantedReport::to_table() const {
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-14s %8s %10s %10s %8s %8s\n", "condition", "lambda_c", "corpus_f1",
                "sent_f1", "das", "uas");
  out << buf;
  for (const auto& r : conditions) {
    std::snprintf(buf, sizeof buf, "%-14s %8.2f %10.2f %10.2f %8.2f %8.2f\n", r.condition.c_str(), r.lambda_c,
                  100 * r.meta.corpus_f1, 100 * r.meta.sentence_f1, 100 * r.meta.das, 100 * r.meta.uas);
    out << buf;
  }
  return out.str();
}

}  // namespace lexinduce
