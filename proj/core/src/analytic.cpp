#include "specflow/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

namespace specflow::analytic {

namespace {

void check(const Scenario& s, bool allow_empty) {
  if (!allow_empty && s.write_probs.empty()) throw std::invalid_argument("scenario needs at least one uncertain task");
  if (!(s.task_cost > 0.0)) throw std::invalid_argument("task cost must be positive");
  for (double p : s.write_probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("write probability outside [0, 1]");
  }
}

double speedup(const Scenario& s, long double gain) {
  const long double total = static_cast<long double>(s.size() + 1) * s.task_cost;
  return static_cast<double>(total / (total - gain));
}

}  // namespace

Scenario uniform(std::size_t n, double write_prob, double task_cost) {
  return Scenario{std::vector<double>(n, write_prob), task_cost};
}

double predictive_gain(const Scenario& s) {
  check(s, false);
  const std::size_t n = s.size();
  long double gain = 0.0L;
  long double survive = 1.0L;  // probability that tasks 1..i all left the data untouched
  for (std::size_t i = 1; i <= n; ++i) {
    survive *= 1.0L - s.write_probs[i - 1];
    const long double next = i < n ? static_cast<long double>(s.write_probs[i]) : 1.0L;
    gain += static_cast<long double>(i) * next * survive;
  }
  return static_cast<double>(gain * s.task_cost);
}

double predictive_speedup(const Scenario& s) { return speedup(s, predictive_gain(s)); }

double predictive_gain_half(std::size_t n, double task_cost) {
  if (n == 0) throw std::invalid_argument("scenario needs at least one uncertain task");
  long double sum = 0.0L;
  for (std::size_t i = 1; i < n; ++i) sum += static_cast<long double>(i) / std::ldexp(1.0L, static_cast<int>(i + 1));
  sum += static_cast<long double>(n) / std::ldexp(1.0L, static_cast<int>(n));
  return static_cast<double>(sum * task_cost);
}

double eager_gain(const Scenario& s) {
  check(s, true);
  long double sum = 0.0L;
  for (double p : s.write_probs) sum += 1.0L - p;
  return static_cast<double>(sum * s.task_cost);
}

double eager_gain_recursive(const Scenario& s) {
  check(s, true);
  long double f = 0.0L;
  for (double p : s.write_probs) f = f * p + (f + s.task_cost) * (1.0L - p);
  return static_cast<double>(f);
}

double eager_speedup(const Scenario& s) { return speedup(s, eager_gain(s)); }

Estimate simulate_expected_gain(const Scenario& s, Strategy strategy, std::size_t trials, std::uint64_t seed) {
  check(s, strategy == Strategy::Eager);
  if (trials == 0) throw std::invalid_argument("at least one trial is required");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  long double sum = 0.0L;
  long double sum_sq = 0.0L;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    std::size_t saved = 0;
    bool chain_alive = true;
    for (double p : s.write_probs) {
      const bool wrote = unit(rng) < p;
      if (strategy == Strategy::Eager) {
        saved += wrote ? 0 : 1;
      } else if (chain_alive) {
        if (wrote) {
          chain_alive = false;
        } else {
          ++saved;
        }
      }
    }
    const long double gain = static_cast<long double>(saved) * s.task_cost;
    sum += gain;
    sum_sq += gain * gain;
  }
  const long double n = static_cast<long double>(trials);
  const long double mean = sum / n;
  const long double var = trials > 1 ? std::max(0.0L, (sum_sq - n * mean * mean) / (n - 1)) : 0.0L;
  return Estimate{static_cast<double>(mean), static_cast<double>(std::sqrt(var / n))};
}

std::vector<TableRow> speedup_table(std::size_t max_n, bool include_eager) {
  std::vector<TableRow> rows;
  for (double p : {0.25, 0.5, 0.75}) {
    for (std::size_t n = 1; n <= max_n; ++n) {
      const Scenario s = uniform(n, p);
      rows.push_back({n, p, predictive_gain(s), predictive_speedup(s), "predictive"});
    }
  }
  if (include_eager) {
    for (double p : {0.25, 0.5, 0.75}) {
      for (std::size_t n = 1; n <= max_n; ++n) {
        const Scenario s = uniform(n, p);
        rows.push_back({n, p, eager_gain(s), eager_speedup(s), "eager"});
      }
    }
  }
  return rows;
}

void write_table_csv(std::ostream& out, const std::vector<TableRow>& rows) {
  out << "N,P,D,S,variant\n";
  for (const TableRow& r : rows) {
    out << fmt::format("{},{},{:.6f},{:.6f},{}\n", r.n, r.write_prob, r.gain, r.speedup, r.variant);
  }
}

}  // namespace specflow::analytic
