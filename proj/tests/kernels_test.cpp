#include <gtest/gtest.h>

#include <omp.h>

#include "lexinduce/corpus_kernels.hpp"
#include "support.hpp"

using namespace lexinduce;
using namespace testing_support;

namespace {

struct Batch {
  LexGrammar grammar;
  std::vector<Sentence> sentences;
  PriorBundle priors;
};

Batch make_batch(std::uint64_t seed, int count) {
  auto inst = random_instance(seed, 5, 3, 3, 6, 1.0, 1.5, 0);
  Batch b{inst.grammar, {}, inst.priors};
  std::mt19937_64 rng(seed);
  auto spans = std::make_shared<RewardedSpanSet>();
  for (int i = 0; i < count; ++i) {
    const int n = 2 + i % 6;
    b.sentences.push_back(random_sentence(rng, n, 6, "s" + std::to_string(i)));
    spans->add(b.sentences.back().id, {0, n - 1, n - 1});
  }
  b.priors.spans = spans;
  return b;
}

bool same(const ExpectedCounts& a, const ExpectedCounts& b) {
  return a.log_marginal == b.log_marginal && a.root == b.root && a.head == b.head && a.dep == b.dep &&
         a.emit == b.emit;
}

class ThreadCount : public testing::TestWithParam<int> {};

}  // namespace

TEST_P(ThreadCount, ParallelMatchesSerialBitForBit) {
  const int saved = omp_get_max_threads();
  omp_set_num_threads(GetParam());
  auto b = make_batch(3, 17);
  auto ptrs = pointers(b.sentences);
  RuleScores scores(b.grammar);
  EXPECT_TRUE(same(batch_counts_parallel(ptrs, scores, b.priors), batch_counts_serial(ptrs, scores, b.priors)));
  EXPECT_EQ(log_marginals_parallel(ptrs, scores, b.priors), log_marginals_serial(ptrs, scores, b.priors));
  auto vp = viterbi_parallel(ptrs, scores, b.priors);
  auto vs = viterbi_serial(ptrs, scores, b.priors);
  ASSERT_EQ(vp.size(), vs.size());
  for (std::size_t i = 0; i < vp.size(); ++i) {
    EXPECT_EQ(vp[i].tree, vs[i].tree);
    EXPECT_EQ(vp[i].score, vs[i].score);
  }
  omp_set_num_threads(saved);
}

INSTANTIATE_TEST_SUITE_P(Kernels, ThreadCount, testing::Values(1, 2, 4, 7));

TEST(Kernels, BatchGradientIsTheSumOfSingletons) {
  auto b = make_batch(5, 3);
  auto ptrs = pointers(b.sentences);
  RuleScores scores(b.grammar);
  GrammarTables batch(b.grammar.shape()), singles(b.grammar.shape());
  accumulate_gradient(batch_counts_parallel(ptrs, scores, b.priors), scores.tables(), batch);
  for (const auto* s : ptrs) {
    std::vector<const Sentence*> one = {s};
    accumulate_gradient(batch_counts_serial(one, scores, b.priors), scores.tables(), singles);
  }
  auto diff = batch;
  diff.axpy(-1.0, singles);
  EXPECT_LE(diff.max_abs(), 1e-10);
}

TEST(Kernels, ThreadCapFromEnvironment) {
  const int saved = omp_get_max_threads();
  omp_set_num_threads(6);
  setenv("LEXINDUCE_THREADS", "2", 1);
  EXPECT_EQ(worker_count(), 2);
  setenv("LEXINDUCE_THREADS", "junk", 1);
  EXPECT_EQ(worker_count(), 6);
  unsetenv("LEXINDUCE_THREADS");
  omp_set_num_threads(saved);
}

TEST(Kernels, ErrorsPropagateOutOfTheParallelRegion) {
  auto b = make_batch(7, 4);
  b.sentences[2].token_ids[0] = 999;
  RuleScores scores(b.grammar);
  EXPECT_ANY_THROW(log_marginals_parallel(pointers(b.sentences), scores, b.priors));
}
