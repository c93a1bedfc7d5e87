// Command-line driver: Monte Carlo / replica exchange benchmarks and the speedup table.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "specflow/analytic.hpp"
#include "specflow/mc/simulation.hpp"
#include "specflow/runtime.hpp"
#include "specflow/trace.hpp"

namespace {

struct SimOptions {
  std::string mode = "spec";
  std::size_t threads = 0;
  std::size_t spec_depth = 5;
  std::size_t domains = 5;
  std::size_t particles = 200;
  double box_length = specflow::mc::kDefaultBoxLength;
  std::size_t iterations = 20;
  std::size_t replicas = 5;
  std::size_t exchange_every = 3;
  double temperature = specflow::mc::kDefaultTemperature;
  std::vector<double> temperatures;
  std::uint64_t seed = 1;
  std::size_t runs = 1;
  bool compare = false;
  std::string csv;
  std::string dot;
  std::string trace;
};

void add_sim_options(CLI::App* cmd, SimOptions& o, bool replica_exchange) {
  cmd->add_option("--mode", o.mode, "task | spec | reject")
      ->check(CLI::IsMember({"task", "spec", "reject"}))
      ->capture_default_str();
  cmd->add_option("--threads,-T", o.threads, "worker threads (default: SPECFLOW_NUM_THREADS or all cores)");
  cmd->add_option("--spec-depth,-S", o.spec_depth, "uncertain tasks before a forced normal task")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--domains", o.domains)->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--particles", o.particles, "particles per domain")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--box-length", o.box_length)->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--iterations", o.iterations)->capture_default_str();
  if (replica_exchange) {
    cmd->add_option("--replicas", o.replicas)->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--exchange-every", o.exchange_every, "iterations between exchange rounds (0: never)")
        ->capture_default_str();
    cmd->add_option("--temperatures", o.temperatures, "one per replica, comma separated (default: ladder from --temperature)")
        ->delimiter(',');
  }
  cmd->add_option("--temperature", o.temperature)->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--seed", o.seed)->capture_default_str();
  cmd->add_option("--runs", o.runs, "timed repetitions averaged")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_flag("--compare", o.compare, "also time task mode and report the speedup");
  cmd->add_option("--csv", o.csv, "append the result row to this CSV file (default: stdout)");
  cmd->add_option("--dot", o.dot, "write the task graph of one extra run");
  cmd->add_option("--trace", o.trace, "write the timeline CSV of one extra run, plus an SVG next to it");
}

specflow::mc::BenchmarkConfig make_config(const SimOptions& o, bool replica_exchange) {
  specflow::mc::BenchmarkConfig cfg;
  auto& b = cfg.remc.base;
  b.mode = *specflow::mc::parse_mode(o.mode);
  b.spec_depth = o.spec_depth;
  b.domains = o.domains;
  b.particles = o.particles;
  b.box_length = o.box_length;
  b.iterations = o.iterations;
  b.temperature = o.temperature;
  b.seed = o.seed;
  cfg.remc.replicas = replica_exchange ? o.replicas : 1;
  cfg.remc.exchange_every = o.exchange_every;
  cfg.remc.temperatures = o.temperatures;
  cfg.exchange = replica_exchange;
  cfg.threads = o.threads == 0 ? specflow::default_worker_count() : o.threads;
  cfg.runs = o.runs;
  return cfg;
}

void emit_row(const std::string& path, const specflow::mc::BenchmarkRecord& rec) {
  if (path.empty()) {
    std::cout << specflow::mc::kBenchmarkCsvHeader << '\n';
    specflow::mc::write_benchmark_row(std::cout, rec);
    return;
  }
  const bool fresh = !std::ifstream(path).good();
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot open '" + path + "'");
  if (fresh) out << specflow::mc::kBenchmarkCsvHeader << '\n';
  specflow::mc::write_benchmark_row(out, rec);
}

int run_simulation(const SimOptions& o, bool replica_exchange) {
  auto cfg = make_config(o, replica_exchange);
  std::optional<double> baseline;
  if (o.compare) {
    auto base_cfg = cfg;
    base_cfg.remc.base.mode = specflow::mc::Mode::Task;
    baseline = specflow::mc::run_benchmark(base_cfg).mean_seconds;
  }
  const auto rec = specflow::mc::run_benchmark(cfg, baseline);
  emit_row(o.csv, rec);

  if (!o.dot.empty() || !o.trace.empty()) {
    specflow::Runtime rt(cfg.threads);
    if (replica_exchange) {
      (void)specflow::mc::run_remc(cfg.remc, rt);
    } else {
      (void)specflow::mc::run_mc(cfg.remc.base, rt);
    }
    if (!o.dot.empty()) {
      std::ofstream dot(o.dot);
      if (!dot) throw std::runtime_error("cannot open '" + o.dot + "'");
      dot << rt.generate_dot();
    }
    if (!o.trace.empty()) {
      const auto records = rt.trace();
      const std::string svg = specflow::write_trace_files(o.trace, records);
      std::cerr << fmt::format("trace written to {} and {}\n", o.trace, svg);
    }
  }
  return 0;
}

int run_table(const std::string& csv, bool eager) {
  const auto rows = specflow::analytic::speedup_table(7, eager);
  if (csv.empty()) {
    specflow::analytic::write_table_csv(std::cout, rows);
    return 0;
  }
  std::ofstream out(csv);
  if (!out) throw std::runtime_error("cannot open '" + csv + "'");
  specflow::analytic::write_table_csv(out, rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Speculative task runtime benchmarks"};
  app.require_subcommand(1);

  SimOptions mc_opts;
  SimOptions remc_opts;
  std::string table_csv;
  bool table_eager = false;

  auto* mc = app.add_subcommand("mc", "Metropolis Monte Carlo over particle domains");
  add_sim_options(mc, mc_opts, false);
  auto* remc = app.add_subcommand("remc", "replica exchange Monte Carlo");
  add_sim_options(remc, remc_opts, true);
  auto* table = app.add_subcommand("table1", "expected gain and speedup of consecutive uncertain tasks");
  table->add_option("--csv", table_csv, "output file (default: stdout)");
  table->add_flag("--eager", table_eager, "also emit the restart-on-failure variant");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (mc->parsed()) return run_simulation(mc_opts, false);
    if (remc->parsed()) return run_simulation(remc_opts, true);
    if (table->parsed()) return run_table(table_csv, table_eager);
  } catch (const std::exception& e) {
    std::cerr << "bench: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
