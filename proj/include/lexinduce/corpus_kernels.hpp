#pragma once

#include <span>
#include <vector>

#include "lexinduce/chart.hpp"

namespace lexinduce {

// Worker threads for the corpus kernels: OpenMP's maximum, capped by the
// LEXINDUCE_THREADS environment variable when it is set.
int worker_count();

// Posterior counts summed over `batch`. Per-sentence work is independent; the
// reduction always runs in batch order, so both variants give bit-identical
// results for any thread count.
ExpectedCounts batch_counts_parallel(std::span<const Sentence* const> batch, const RuleScores& scores,
                                     const PriorBundle& priors);
ExpectedCounts batch_counts_serial(std::span<const Sentence* const> batch, const RuleScores& scores,
                                   const PriorBundle& priors);

std::vector<double> log_marginals_parallel(std::span<const Sentence* const> batch, const RuleScores& scores,
                                           const PriorBundle& priors);
std::vector<double> log_marginals_serial(std::span<const Sentence* const> batch, const RuleScores& scores,
                                         const PriorBundle& priors);

// Decodes with priors.for_decoding().
std::vector<ViterbiResult> viterbi_parallel(std::span<const Sentence* const> batch, const RuleScores& scores,
                                            const PriorBundle& priors);
std::vector<ViterbiResult> viterbi_serial(std::span<const Sentence* const> batch, const RuleScores& scores,
                                          const PriorBundle& priors);

std::vector<const Sentence*> pointers(const std::vector<Sentence>& sentences);

}  // namespace lexinduce
