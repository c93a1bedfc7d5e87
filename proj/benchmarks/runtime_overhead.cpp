#include <benchmark/benchmark.h>

#include "specflow/runtime.hpp"

namespace {

// Insertion plus execution of a chain of empty tasks on one datum.
void BM_NormalChain(benchmark::State& state) {
  specflow::Runtime rt(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    rt.reset();
    int x = 0;
    const auto h = rt.register_data(x);
    for (std::size_t i = 0; i < n; ++i) rt.task(specflow::write(h), [](int& v) { ++v; });
    rt.wait_all();
    benchmark::DoNotOptimize(x);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_NormalChain)->Arg(64)->Arg(512);

// Alternating uncertain and normal tasks, so every pair builds a copy, a twin and a select.
void BM_SpeculativeChain(benchmark::State& state) {
  specflow::Runtime rt(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  const bool writes = state.range(1) != 0;
  for (auto _ : state) {
    rt.reset();
    int x = 0;
    const auto h = rt.register_data(x);
    for (std::size_t i = 0; i < n; ++i) {
      rt.potential_task(specflow::maybe_write(h), [writes](int& v) {
        if (writes) ++v;
        return writes;
      });
      rt.task(specflow::write(h), [](int& v) { v += 2; });
    }
    rt.wait_all();
    benchmark::DoNotOptimize(x);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * 2 * n));
}
BENCHMARK(BM_SpeculativeChain)->Args({64, 0})->Args({64, 1})->Args({512, 0});

// Independent tasks over many data: measures queue and dispatch cost.
void BM_IndependentTasks(benchmark::State& state) {
  specflow::Runtime rt(static_cast<std::size_t>(state.range(1)));
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<int> data(n);
  for (auto _ : state) {
    rt.reset();
    for (std::size_t i = 0; i < n; ++i) {
      const auto h = rt.register_data(data[i]);
      rt.task(specflow::write(h), [](int& v) { ++v; });
    }
    rt.wait_all();
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_IndependentTasks)->Args({256, 1})->Args({256, 4});

}  // namespace
