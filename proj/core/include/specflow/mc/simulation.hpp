#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "specflow/mc/physics.hpp"
#include "specflow/runtime.hpp"

namespace specflow::mc {

enum class Mode { Task, Spec, Reject };

[[nodiscard]] std::string_view to_string(Mode mode);
[[nodiscard]] std::optional<Mode> parse_mode(std::string_view text);

/// Calibrated so that 5 domains of 200 particles accept about 45% of the moves.
inline constexpr double kDefaultBoxLength = 100.0;
inline constexpr double kDefaultTemperature = 4.0;

struct McConfig {
  std::size_t domains = 5;
  std::size_t particles = 200;
  double box_length = kDefaultBoxLength;
  std::size_t iterations = 20;
  double temperature = kDefaultTemperature;
  Mode mode = Mode::Spec;
  /// Consecutive uncertain tasks inserted before a forced normal task.
  std::size_t spec_depth = 5;
  std::uint64_t seed = 1;
};

struct RemcConfig {
  McConfig base;
  std::size_t replicas = 5;
  /// 0 disables exchanges.
  std::size_t exchange_every = 3;
  /// One per replica; empty means a geometric ladder from base.temperature upward by 1.5x.
  std::vector<double> temperatures;
};

struct ReplicaResult {
  double temperature = 0.0;
  /// One flag per (iteration, domain), iteration-major.
  std::vector<std::uint8_t> accepted;
  double initial_energy = 0.0;
  double final_energy = 0.0;
  EnergyState energy;
  std::vector<ParticleDomain> domains;
  /// |recomputed - maintained| / max(1, |recomputed|).
  double audit_error = 0.0;

  [[nodiscard]] std::size_t accept_count() const;
};

struct SimulationResult {
  std::vector<ReplicaResult> replicas;
  /// One flag per (exchange round, lower replica of the pair); 0 for pairs not tested.
  std::vector<std::uint8_t> exchanges;
  std::size_t exchange_rounds = 0;
  /// Wall time from the first insertion to completion.
  double seconds = 0.0;

  [[nodiscard]] double accept_ratio() const;
  [[nodiscard]] double max_audit_error() const;
};

/// Replica pairs tested at exchange round `round` (1-based): (0,1),(2,3),... on odd
/// rounds, (1,2),(3,4),... on even ones.
[[nodiscard]] std::vector<std::size_t> exchange_pairs(std::size_t round, std::size_t replicas);

[[nodiscard]] std::vector<double> temperature_ladder(const RemcConfig& config);

/// Single-replica Metropolis simulation. Resets `runtime` first.
SimulationResult run_mc(const McConfig& config, Runtime& runtime);
/// Replica exchange over independent Metropolis streams. Resets `runtime` first.
SimulationResult run_remc(const RemcConfig& config, Runtime& runtime);

struct BenchmarkConfig {
  RemcConfig remc;
  /// false runs plain Metropolis (a single replica, no exchanges).
  bool exchange = false;
  std::size_t threads = 1;
  std::size_t runs = 1;
};

struct BenchmarkRecord {
  std::string mode;
  std::size_t threads = 0;
  std::size_t spec_depth = 0;
  std::size_t domains = 0;
  std::size_t particles = 0;
  std::size_t replicas = 0;
  std::size_t iterations = 0;
  std::uint64_t seed = 0;
  double mean_seconds = 0.0;
  double accept_ratio = 0.0;
  std::optional<double> speedup_vs_task_baseline;
  double max_audit_error = 0.0;
};

/// Runs the configuration `runs` times on a fresh runtime and averages wall time.
/// Throws std::runtime_error if an energy audit exceeds 1e-9.
BenchmarkRecord run_benchmark(const BenchmarkConfig& config, std::optional<double> baseline_seconds = std::nullopt);

inline constexpr std::string_view kBenchmarkCsvHeader =
    "mode,T,S,domains,particles,replicas,iterations,seed,mean_seconds,accept_ratio,speedup_vs_task_baseline";
void write_benchmark_row(std::ostream& out, const BenchmarkRecord& record);

}  // namespace specflow::mc
