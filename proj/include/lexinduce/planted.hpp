#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lexinduce/alignment.hpp"
#include "lexinduce/training.hpp"

namespace lexinduce {

// A caption drawn from a small head-annotated template grammar in which
// nouns are the most concrete words and head the sentence.
struct PlantedSentence {
  std::string id;
  std::vector<std::string> tokens;
  std::vector<std::string> lemmas;
  std::vector<std::string> tags;
  LexTree tree;  // labels are placeholders: 0 inside, 1 at leaves
  LabelInput labels;
};

struct PlantedCorpus {
  std::vector<PlantedSentence> sentences;
  std::vector<std::pair<std::string, double>> ratings;  // lemma, raw 1..5

  ConcretenessLexicon lexicon(NormalizationMode mode = NormalizationMode::DivideBy5) const;
};

// `degenerate` restricts every sentence to "DET NOUN".
PlantedCorpus sample_planted_corpus(int num_sentences, std::uint64_t seed, const std::string& id_prefix = "s",
                                    bool degenerate = false);

// "(NOUN (DET a) (NOUN dog))", labelled with the head's tag.
std::string gold_bracketed(const PlantedSentence& s);

struct PlantedConfig {
  int num_seeds = 5;
  std::uint64_t base_seed = 1;
  int train_sentences = 150;
  int valid_sentences = 50;
  int nonterminals = 4;
  int preterminals = 6;
  int epochs = 6;
  int batch_size = 10;
  double learning_rate = 0.1;
  double lambda_c = 1.3;

  void validate() const;
};

struct PlantedRow {
  std::string condition;
  double lambda_c = 0.0;
  std::uint64_t seed = 0;  // unused in condition means
  CheckpointMeta meta;     // selected checkpoint, or the mean over seeds
};

struct PlantedReport {
  std::vector<PlantedRow> conditions;  // baseline, then concreteness
  std::vector<PlantedRow> runs;
  std::vector<double> initial_objectives;  // parallel to runs
  std::vector<double> final_objectives;

  bool objective_improved_everywhere() const;
  double das_gain() const;  // concreteness mean DAS minus baseline mean DAS
  std::string to_json() const;
  std::string to_table() const;
};

// Sentences become Sentence objects over a vocabulary built from the corpus.
struct PlantedData {
  Vocabulary vocab;
  std::vector<Sentence> train;
  ValidationSet valid;
  ConcretenessLexicon lexicon;
};

PlantedData make_planted_data(const PlantedCorpus& train, const PlantedCorpus& valid);

PlantedReport planted_grammar_experiment(const PlantedConfig& config);

}  // namespace lexinduce
