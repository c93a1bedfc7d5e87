#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace specflow::analytic {

/// N consecutive uncertain tasks followed by one normal task, all of cost `task_cost`.
/// `write_probs[i]` is the probability that uncertain task i+1 writes.
struct Scenario {
  std::vector<double> write_probs;
  double task_cost = 1.0;

  [[nodiscard]] std::size_t size() const { return write_probs.size(); }
};

[[nodiscard]] Scenario uniform(std::size_t n, double write_prob, double task_cost = 1.0);

/// Mean time saved by predictive speculation: the chain runs speculatively up
/// to the first uncertain task that writes. Requires at least one uncertain task.
[[nodiscard]] double predictive_gain(const Scenario& s);
/// (N+1)t / ((N+1)t - gain).
[[nodiscard]] double predictive_speedup(const Scenario& s);
/// Closed form of predictive_gain when every write probability is 1/2.
[[nodiscard]] double predictive_gain_half(std::size_t n, double task_cost = 1.0);

/// Mean time saved when speculation restarts after every failure.
[[nodiscard]] double eager_gain(const Scenario& s);
/// Same quantity through the one-task-at-a-time recurrence.
[[nodiscard]] double eager_gain_recursive(const Scenario& s);
[[nodiscard]] double eager_speedup(const Scenario& s);

enum class Strategy { Predictive, Eager };

struct Estimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

/// Monte Carlo estimate of the gain, drawing write outcomes from the scenario.
[[nodiscard]] Estimate simulate_expected_gain(const Scenario& s, Strategy strategy, std::size_t trials,
                                              std::uint64_t seed);

struct TableRow {
  std::size_t n = 0;
  double write_prob = 0.0;
  double gain = 0.0;
  double speedup = 0.0;
  std::string variant;
};

/// Predictive gains and speedups for P in {1/4, 1/2, 3/4} and N = 1..max_n, t = 1.
[[nodiscard]] std::vector<TableRow> speedup_table(std::size_t max_n = 7, bool include_eager = false);

/// CSV with header `N,P,D,S,variant`.
void write_table_csv(std::ostream& out, const std::vector<TableRow>& rows);

}  // namespace specflow::analytic
