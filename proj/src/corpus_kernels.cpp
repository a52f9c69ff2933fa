#include "lexinduce/corpus_kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>

namespace lexinduce {

int worker_count() {
  int n = omp_get_max_threads();
  if (const char* env = std::getenv("LEXINDUCE_THREADS")) {
    try {
      int cap = std::stoi(env);
      if (cap >= 1) n = std::min(n, cap);
    } catch (const std::exception&) {
      // unparsable value: ignore the cap
    }
  }
  return std::max(n, 1);
}

std::vector<const Sentence*> pointers(const std::vector<Sentence>& sentences) {
  std::vector<const Sentence*> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(&s);
  return out;
}

namespace {

// Runs fn(i) over [0, n) on the worker pool and rethrows the first failure
// (lowest index) on the calling thread.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

ExpectedCounts batch_counts_parallel(std::span<const Sentence* const> batch, const RuleScores& scores,
                                     const PriorBundle& priors) {
  std::vector<ExpectedCounts> per(batch.size());
  parallel_for(batch.size(), [&](std::size_t i) {
    per[i] = posterior_counts(*batch[i], scores, SentencePriors::bind(priors, *batch[i]));
  });
  ExpectedCounts total(scores.shape());
  for (const auto& c : per) total.add(c);
  return total;
}

ExpectedCounts batch_counts_serial(std::span<const Sentence* const> batch, const RuleScores& scores,
                                   const PriorBundle& priors) {
  ExpectedCounts total(scores.shape());
  for (const Sentence* s : batch) total.add(posterior_counts(*s, scores, SentencePriors::bind(priors, *s)));
  return total;
}

std::vector<double> log_marginals_parallel(std::span<const Sentence* const> batch, const RuleScores& scores,
                                           const PriorBundle& priors) {
  std::vector<double> out(batch.size());
  parallel_for(batch.size(), [&](std::size_t i) {
    out[i] = inside(*batch[i], scores, SentencePriors::bind(priors, *batch[i])).log_marginal;
  });
  return out;
}

std::vector<double> log_marginals_serial(std::span<const Sentence* const> batch, const RuleScores& scores,
                                         const PriorBundle& priors) {
  std::vector<double> out;
  out.reserve(batch.size());
  for (const Sentence* s : batch) out.push_back(inside(*s, scores, SentencePriors::bind(priors, *s)).log_marginal);
  return out;
}

std::vector<ViterbiResult> viterbi_parallel(std::span<const Sentence* const> batch, const RuleScores& scores,
                                            const PriorBundle& priors) {
  const PriorBundle decode = priors.for_decoding();
  std::vector<ViterbiResult> out(batch.size());
  parallel_for(batch.size(), [&](std::size_t i) {
    out[i] = viterbi(*batch[i], scores, SentencePriors::bind(decode, *batch[i]));
  });
  return out;
}

std::vector<ViterbiResult> viterbi_serial(std::span<const Sentence* const> batch, const RuleScores& scores,
                                          const PriorBundle& priors) {
  const PriorBundle decode = priors.for_decoding();
  std::vector<ViterbiResult> out;
  out.reserve(batch.size());
  for (const Sentence* s : batch) out.push_back(viterbi(*s, scores, SentencePriors::bind(decode, *s)));
  return out;
}

}  // namespace lexinduce
