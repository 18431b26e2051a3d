#include <benchmark/benchmark.h>

#include <vector>

#include "varcvar/is_esscher.hpp"
#include "varcvar/is_translation.hpp"
#include "varcvar/naive_estimator.hpp"
#include "varcvar/oracle.hpp"

using namespace varcvar;

namespace {

void BM_NaiveRecursion(benchmark::State& st) {
  ShortPutModel m;
  RunOptions o;
  o.alpha = 0.95;
  o.n_steps = static_cast<std::size_t>(st.range(0));
  o.xi0 = 24.0;
  o.c0 = 30.0;
  for (auto _ : st) {
    Rng rng(1);
    benchmark::DoNotOptimize(run_naive(m, o, rng).var_hat);
  }
  st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_NaiveRecursion)->RangeMultiplier(10)->Range(10000, 1000000)->Complexity(benchmark::oN);

// the reference it replaces: draw everything, then sort
void BM_SortedQuantile(benchmark::State& st) {
  ShortPutModel m;
  const auto n = static_cast<std::size_t>(st.range(0));
  std::vector<double> x(1), l(n);
  for (auto _ : st) {
    Rng rng(1);
    for (auto& v : l) {
      m.distribution().sample(rng, x);
      v = m.loss(x);
    }
    benchmark::DoNotOptimize(empirical_quantile(l, 0.95));
  }
  st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_SortedQuantile)->RangeMultiplier(10)->Range(10000, 1000000)->Complexity(benchmark::oNLogN);

void BM_TranslationTwoPhase(benchmark::State& st) {
  ShortPutModel m;
  TwoPhaseOptions o;
  o.run.alpha = 0.99;
  o.run.n_steps = 100000;
  for (auto _ : st) {
    Rng rng(2);
    benchmark::DoNotOptimize(run_translation(m, o, rng).cvar_hat);
  }
}
BENCHMARK(BM_TranslationTwoPhase)->Unit(benchmark::kMillisecond);

void BM_BasketTwoPhase(benchmark::State& st) {
  BasketStrangleModel m;
  TwoPhaseOptions o;
  o.run.alpha = 0.95;
  o.run.n_steps = 100000;
  for (auto _ : st) {
    Rng rng(3);
    benchmark::DoNotOptimize(run_translation(m, o, rng).cvar_hat);
  }
}
BENCHMARK(BM_BasketTwoPhase)->Unit(benchmark::kMillisecond);

void BM_EsscherTwoPhase(benchmark::State& st) {
  NigCallModel m;
  TwoPhaseOptions o;
  o.run.alpha = 0.95;
  o.run.n_steps = 100000;
  EsscherOptions es;
  for (auto _ : st) {
    Rng rng(4);
    benchmark::DoNotOptimize(run_esscher(m, o, es, rng).cvar_hat);
  }
}
BENCHMARK(BM_EsscherTwoPhase)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
