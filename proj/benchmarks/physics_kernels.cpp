#include <benchmark/benchmark.h>

#include "specflow/mc/physics.hpp"

namespace {

using namespace specflow::mc;

std::vector<ParticleDomain> system_of(std::size_t domains, std::size_t particles) {
  std::vector<ParticleDomain> out;
  for (std::size_t d = 0; d < domains; ++d) out.push_back(random_domain(d, particles, 100.0, {1, 0, 0, d, Purpose::Init}));
  return out;
}

void BM_ComputeEnergy(benchmark::State& state) {
  const auto domains = system_of(5, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(compute_energy(domains).total);
}
BENCHMARK(BM_ComputeEnergy)->Arg(50)->Arg(200);

// One Monte Carlo step: move, incremental energy and acceptance test.
void BM_MoveAndUpdate(benchmark::State& state) {
  const auto domains = system_of(5, static_cast<std::size_t>(state.range(0)));
  const auto energy = compute_energy(domains);
  std::uint64_t it = 0;
  for (auto _ : state) {
    const auto cand = move_domain(domains[2], 100.0, {1, 0, ++it, 2, Purpose::Move});
    const auto upd = update_energy(energy, domains, 2, cand);
    benchmark::DoNotOptimize(metropolis_accept(upd.total, energy.total, 4.0, RngKey{1, 0, it, 2, Purpose::Accept}));
  }
}
BENCHMARK(BM_MoveAndUpdate)->Arg(50)->Arg(200);

void BM_KeyedStream(benchmark::State& state) {
  std::uint64_t i = 0;
  for (auto _ : state) {
    KeyedStream s({7, 0, ++i, 0, Purpose::Move});
    benchmark::DoNotOptimize(s.uniform01());
  }
}
BENCHMARK(BM_KeyedStream);

}  // namespace
