// Serial vs OpenMP corpus kernels on a planted corpus.
//   LEXINDUCE_THREADS=4 ./bench_corpus
#include <benchmark/benchmark.h>

#include "lexinduce/corpus_kernels.hpp"
#include "lexinduce/planted.hpp"

using namespace lexinduce;

namespace {

struct Fixture {
  PlantedData data;
  LexGrammar grammar;
  PriorBundle priors;
  std::vector<const Sentence*> batch;

  explicit Fixture(int nonterminals)
      : data(make_planted_data(sample_planted_corpus(256, 11, "b"), sample_planted_corpus(1, 12, "v"))),
        grammar(LexGrammar::new_random(config(nonterminals), data.vocab)) {
    priors.lambda_c = 1.0;
    priors.lexicon = std::make_shared<ConcretenessLexicon>(data.lexicon);
    batch = pointers(data.train);
  }

  static GrammarConfig config(int nonterminals) {
    GrammarConfig c;
    c.num_nonterminals = nonterminals;
    c.num_preterminals = 6;
    c.seed = 5;
    return c;
  }
};

const Fixture& fixture(int nonterminals) {
  static std::map<int, Fixture> cache;
  auto it = cache.find(nonterminals);
  if (it == cache.end()) it = cache.emplace(nonterminals, Fixture(nonterminals)).first;
  return it->second;
}

template <auto Kernel>
void run(benchmark::State& state) {
  const auto& f = fixture(static_cast<int>(state.range(0)));
  RuleScores scores(f.grammar);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(f.batch, scores, f.priors));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.batch.size()));
  state.counters["threads"] = worker_count();
}

}  // namespace

BENCHMARK(run<batch_counts_serial>)->Name("counts/serial")->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(run<batch_counts_parallel>)->Name("counts/parallel")->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(run<log_marginals_serial>)->Name("inside/serial")->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(run<log_marginals_parallel>)->Name("inside/parallel")->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(run<viterbi_serial>)->Name("viterbi/serial")->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(run<viterbi_parallel>)->Name("viterbi/parallel")->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
