#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "lexinduce/chart.hpp"

namespace lexinduce {

// Test oracle: visits every binary head-annotated labeled tree once.
inline constexpr int kMaxEnumerationLength = 8;

struct ScoredTree {
  LexTree tree;
  double score = 0.0;
};

// Throws ConfigError when n > kMaxEnumerationLength.
void for_each_tree(int length, const GrammarShape& shape, const std::function<void(const LexTree&)>& visit);

std::vector<ScoredTree> enumerate_trees(const Sentence& sentence, const RuleScores& scores,
                                        const SentencePriors& priors);

struct EnumerationSummary {
  std::size_t count = 0;
  double log_sum = 0.0;  // logsumexp of all tree scores
  double max_score = 0.0;
};

// Streams the enumeration without materializing the tree list.
EnumerationSummary enumerate_summary(const Sentence& sentence, const RuleScores& scores,
                                     const SentencePriors& priors);

}  // namespace lexinduce
