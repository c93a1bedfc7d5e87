#include <benchmark/benchmark.h>

#include "specflow/analytic.hpp"

namespace {

using namespace specflow::analytic;

void BM_PredictiveGain(benchmark::State& state) {
  const auto s = uniform(static_cast<std::size_t>(state.range(0)), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(predictive_gain(s));
}
BENCHMARK(BM_PredictiveGain)->Arg(7)->Arg(64);

void BM_EagerGain(benchmark::State& state) {
  const auto s = uniform(static_cast<std::size_t>(state.range(0)), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(eager_gain(s));
}
BENCHMARK(BM_EagerGain)->Arg(7)->Arg(64);

void BM_SimulatedGain(benchmark::State& state) {
  const auto s = uniform(7, 0.25);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_expected_gain(s, Strategy::Predictive, 10000, 1).mean);
}
BENCHMARK(BM_SimulatedGain);

}  // namespace

BENCHMARK_MAIN();
