#include "specflow/mc/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace specflow::mc {

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::Task: return "task";
    case Mode::Spec: return "spec";
    case Mode::Reject: return "reject";
  }
  return "?";
}

std::optional<Mode> parse_mode(std::string_view text) {
  if (text == "task") return Mode::Task;
  if (text == "spec") return Mode::Spec;
  if (text == "reject") return Mode::Reject;
  return std::nullopt;
}

std::size_t ReplicaResult::accept_count() const {
  return static_cast<std::size_t>(std::count(accepted.begin(), accepted.end(), std::uint8_t{1}));
}

double SimulationResult::accept_ratio() const {
  std::size_t accepted = 0;
  std::size_t total = 0;
  for (const ReplicaResult& r : replicas) {
    accepted += r.accept_count();
    total += r.accepted.size();
  }
  return total == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(total);
}

double SimulationResult::max_audit_error() const {
  double worst = 0.0;
  for (const ReplicaResult& r : replicas) worst = std::max(worst, r.audit_error);
  return worst;
}

std::vector<std::size_t> exchange_pairs(std::size_t round, std::size_t replicas) {
  std::vector<std::size_t> lows;
  for (std::size_t s = round % 2 == 1 ? 0 : 1; s + 1 < replicas; s += 2) lows.push_back(s);
  return lows;
}

std::vector<double> temperature_ladder(const RemcConfig& config) {
  if (!config.temperatures.empty()) {
    if (config.temperatures.size() != config.replicas) {
      throw std::invalid_argument("one temperature per replica is required");
    }
    return config.temperatures;
  }
  std::vector<double> ladder(config.replicas);
  double t = config.base.temperature;
  for (double& v : ladder) {
    v = t;
    t *= 1.5;
  }
  return ladder;
}

namespace {

void validate(const RemcConfig& config) {
  const McConfig& b = config.base;
  if (b.domains == 0 || b.particles == 0) throw std::invalid_argument("domains and particles must be positive");
  if (b.spec_depth == 0) throw std::invalid_argument("spec depth must be at least 1");
  if (!(b.box_length > 0.0)) throw std::invalid_argument("box length must be positive");
  if (config.replicas == 0) throw std::invalid_argument("at least one replica is required");
  for (double t : temperature_ladder(config)) {
    if (!(t > 0.0)) throw std::invalid_argument("temperatures must be positive");
  }
}

struct ReplicaData {
  std::vector<ParticleDomain> domains;
  EnergyState energy;
  std::vector<std::uint8_t> accepted;
  Handle<EnergyState> energy_handle;
  std::vector<Handle<ParticleDomain>> domain_handles;
  std::vector<Handle<std::uint8_t>> flag_handles;
  std::size_t inserted_steps = 0;
};

void insert_step(Runtime& rt, const McConfig& cfg, ReplicaData& rep, std::size_t replica, double temperature,
                 std::size_t iteration, std::size_t domain) {
  const bool uncertain = cfg.mode != Mode::Task && rep.inserted_steps % (cfg.spec_depth + 1) != cfg.spec_depth;
  ++rep.inserted_steps;
  const AccessMode modify = uncertain ? AccessMode::MaybeWrite : AccessMode::Write;

  const Handle<EnergyState> energy = rep.energy_handle;
  const Handle<std::uint8_t> flag = rep.flag_handles[iteration * cfg.domains + domain];
  std::vector<Handle<ParticleDomain>> domains = rep.domain_handles;

  std::vector<AccessRecord> accesses{{energy, modify}, {domains[domain], modify}, {flag, modify}};
  for (std::size_t j = 0; j < domains.size(); ++j) {
    if (j != domain) accesses.push_back(read(DataHandle(domains[j])));
  }

  const RngKey move_key{cfg.seed, replica, iteration, domain, Purpose::Move};
  const RngKey accept_key{cfg.seed, replica, iteration, domain, Purpose::Accept};
  const double box = cfg.box_length;
  const bool force_reject = cfg.mode == Mode::Reject;
  TaskBody body = [=](TaskContext& ctx) -> bool {
    EnergyState& e = ctx.get<EnergyState>(energy);
    ParticleDomain& moved = ctx.get<ParticleDomain>(domains[domain]);
    std::vector<const ParticleDomain*> view(domains.size());
    for (std::size_t j = 0; j < domains.size(); ++j) {
      view[j] = j == domain ? &moved : &ctx.get<const ParticleDomain>(domains[j]);
    }
    ParticleDomain candidate = move_domain(moved, box, move_key);
    const EnergyUpdate update = update_energy(e, view, domain, candidate);
    if (force_reject || !metropolis_accept(update.total, e.total, temperature, accept_key)) return false;
    moved = std::move(candidate);
    apply_update(e, update);
    ctx.get<std::uint8_t>(flag) = 1;
    return true;
  };
  TaskOptions options{fmt::format("r{}i{}d{}", replica, iteration, domain), "move"};
  if (uncertain) {
    rt.insert_uncertain_task(std::move(accesses), std::move(body), std::move(options));
  } else {
    rt.insert_task(std::move(accesses), std::move(body), std::move(options));
  }
}

void insert_exchange(Runtime& rt, const McConfig& cfg, ReplicaData& low, ReplicaData& high, std::size_t low_index,
                     double t_low, double t_high, std::size_t round, Handle<std::uint8_t> flag) {
  std::vector<AccessRecord> accesses{write(low.energy_handle.raw()), write(high.energy_handle.raw()),
                                     write(flag.raw())};
  for (auto h : low.domain_handles) accesses.push_back(write(h.raw()));
  for (auto h : high.domain_handles) accesses.push_back(write(h.raw()));

  const RngKey key{cfg.seed, low_index, round, 0, Purpose::Exchange};
  const auto low_energy = low.energy_handle;
  const auto high_energy = high.energy_handle;
  const auto low_domains = low.domain_handles;
  const auto high_domains = high.domain_handles;
  TaskBody body = [=](TaskContext& ctx) -> bool {
    EnergyState& el = ctx.get<EnergyState>(low_energy);
    EnergyState& eh = ctx.get<EnergyState>(high_energy);
    KeyedStream stream(key);
    if (!exchange_accept(t_low, el.total, t_high, eh.total, stream.uniform01())) return false;
    std::swap(el, eh);
    for (std::size_t d = 0; d < low_domains.size(); ++d) {
      std::swap(ctx.get<ParticleDomain>(low_domains[d]), ctx.get<ParticleDomain>(high_domains[d]));
    }
    ctx.get<std::uint8_t>(flag) = 1;
    return true;
  };
  rt.insert_task(std::move(accesses), std::move(body),
                 TaskOptions{fmt::format("exchange{}:{}-{}", round, low_index, low_index + 1), "exchange"});
}

SimulationResult simulate(const RemcConfig& config, bool exchanges_enabled, Runtime& rt) {
  validate(config);
  rt.reset();
  const McConfig& cfg = config.base;
  const std::vector<double> temps = temperature_ladder(config);
  const std::size_t rounds =
      exchanges_enabled && config.exchange_every > 0 ? cfg.iterations / config.exchange_every : 0;

  std::vector<ReplicaData> reps(config.replicas);
  std::vector<std::uint8_t> exchange_flags(rounds * config.replicas, 0);
  for (std::size_t r = 0; r < reps.size(); ++r) {
    ReplicaData& rep = reps[r];
    rep.domains.reserve(cfg.domains);
    for (std::size_t d = 0; d < cfg.domains; ++d) {
      rep.domains.push_back(random_domain(d, cfg.particles, cfg.box_length, RngKey{cfg.seed, r, 0, d, Purpose::Init}));
    }
    rep.accepted.assign(cfg.iterations * cfg.domains, 0);
  }

  const auto start = std::chrono::steady_clock::now();
  for (std::size_t r = 0; r < reps.size(); ++r) {
    ReplicaData& rep = reps[r];
    rep.energy_handle = rt.register_data(rep.energy, fmt::format("energy{}", r));
    for (std::size_t d = 0; d < cfg.domains; ++d) {
      rep.domain_handles.push_back(rt.register_data(rep.domains[d], fmt::format("r{}d{}", r, d)));
    }
    for (std::size_t i = 0; i < rep.accepted.size(); ++i) {
      rep.flag_handles.push_back(rt.register_data(rep.accepted[i], fmt::format("r{}f{}", r, i)));
    }
    std::vector<AccessRecord> accesses{write(rep.energy_handle.raw())};
    for (auto h : rep.domain_handles) accesses.push_back(read(h.raw()));
    const auto energy = rep.energy_handle;
    const auto domains = rep.domain_handles;
    rt.insert_task(
        std::move(accesses),
        [energy, domains](TaskContext& ctx) {
          std::vector<ParticleDomain> copy;
          copy.reserve(domains.size());
          for (auto h : domains) copy.push_back(ctx.get<const ParticleDomain>(h));
          ctx.get<EnergyState>(energy) = compute_energy(copy);
          return false;
        },
        TaskOptions{fmt::format("init{}", r), "init"});
  }
  std::vector<Handle<std::uint8_t>> exchange_handles;
  for (std::size_t i = 0; i < exchange_flags.size(); ++i) {
    exchange_handles.push_back(rt.register_data(exchange_flags[i], fmt::format("x{}", i)));
  }

  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    for (std::size_t r = 0; r < reps.size(); ++r) {
      for (std::size_t d = 0; d < cfg.domains; ++d) insert_step(rt, cfg, reps[r], r, temps[r], it, d);
    }
    if (rounds > 0 && (it + 1) % config.exchange_every == 0) {
      const std::size_t round = (it + 1) / config.exchange_every;
      for (std::size_t s : exchange_pairs(round, reps.size())) {
        insert_exchange(rt, cfg, reps[s], reps[s + 1], s, temps[s], temps[s + 1], round,
                        exchange_handles[(round - 1) * config.replicas + s]);
      }
    }
  }
  rt.wait_all();
  const auto stop = std::chrono::steady_clock::now();

  SimulationResult result;
  result.seconds = std::chrono::duration<double>(stop - start).count();
  result.exchange_rounds = rounds;
  result.exchanges = exchange_flags;
  for (std::size_t r = 0; r < reps.size(); ++r) {
    ReplicaData& rep = reps[r];
    ReplicaResult out;
    out.temperature = temps[r];
    out.accepted = rep.accepted;
    out.final_energy = rep.energy.total;
    out.energy = rep.energy;
    out.domains = rep.domains;
    std::vector<ParticleDomain> initial;
    for (std::size_t d = 0; d < cfg.domains; ++d) {
      initial.push_back(random_domain(d, cfg.particles, cfg.box_length, RngKey{cfg.seed, r, 0, d, Purpose::Init}));
    }
    out.initial_energy = compute_energy(initial).total;
    const double recomputed = compute_energy(rep.domains).total;
    out.audit_error = std::abs(recomputed - rep.energy.total) / std::max(1.0, std::abs(recomputed));
    result.replicas.push_back(std::move(out));
  }
  return result;
}

}  // namespace

SimulationResult run_mc(const McConfig& config, Runtime& runtime) {
  RemcConfig single;
  single.base = config;
  single.replicas = 1;
  single.exchange_every = 0;
  single.temperatures = {config.temperature};
  return simulate(single, false, runtime);
}

SimulationResult run_remc(const RemcConfig& config, Runtime& runtime) { return simulate(config, true, runtime); }

BenchmarkRecord run_benchmark(const BenchmarkConfig& config, std::optional<double> baseline_seconds) {
  if (config.runs == 0) throw std::invalid_argument("at least one run is required");
  if (config.threads == 0) throw std::invalid_argument("at least one thread is required");
  Runtime rt(config.threads);
  double total_seconds = 0.0;
  double accept = 0.0;
  double audit = 0.0;
  for (std::size_t run = 0; run < config.runs; ++run) {
    const SimulationResult res = config.exchange ? run_remc(config.remc, rt) : run_mc(config.remc.base, rt);
    total_seconds += res.seconds;
    accept = res.accept_ratio();
    audit = std::max(audit, res.max_audit_error());
  }
  if (audit > 1e-9) throw std::runtime_error(fmt::format("energy audit failed: relative error {}", audit));

  const McConfig& b = config.remc.base;
  BenchmarkRecord rec;
  rec.mode = std::string(to_string(b.mode));
  rec.threads = config.threads;
  rec.spec_depth = b.spec_depth;
  rec.domains = b.domains;
  rec.particles = b.particles;
  rec.replicas = config.exchange ? config.remc.replicas : 1;
  rec.iterations = b.iterations;
  rec.seed = b.seed;
  rec.mean_seconds = total_seconds / static_cast<double>(config.runs);
  rec.accept_ratio = accept;
  rec.max_audit_error = audit;
  if (baseline_seconds) rec.speedup_vs_task_baseline = *baseline_seconds / rec.mean_seconds;
  return rec;
}

void write_benchmark_row(std::ostream& out, const BenchmarkRecord& r) {
  out << fmt::format("{},{},{},{},{},{},{},{},{:.6f},{:.4f},", r.mode, r.threads, r.spec_depth, r.domains, r.particles,
                     r.replicas, r.iterations, r.seed, r.mean_seconds, r.accept_ratio);
  if (r.speedup_vs_task_baseline) out << fmt::format("{:.4f}", *r.speedup_vs_task_baseline);
  out << '\n';
}

}  // namespace specflow::mc
