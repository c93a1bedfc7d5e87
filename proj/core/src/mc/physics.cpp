#include "specflow/mc/physics.hpp"

#include <cmath>
#include <stdexcept>

namespace specflow::mc {

double EnergyMatrix::total() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i; j < n_; ++j) sum += at(i, j);
  }
  return sum;
}

double pair_energy(double r2) {
  if (r2 <= 0.0) throw std::domain_error("coincident particles");
  const double inv6 = 1.0 / (r2 * r2 * r2);
  return 4.0 * (inv6 * inv6 - inv6);
}

namespace {

double dist2(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return dx * dx + dy * dy + dz * dz;
}

}  // namespace

double intra_energy(const ParticleDomain& d) {
  double sum = 0.0;
  const auto& p = d.particles;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j < p.size(); ++j) sum += pair_energy(dist2(p[i], p[j]));
  }
  return sum;
}

double cross_energy(const ParticleDomain& a, const ParticleDomain& b) {
  double sum = 0.0;
  for (const Vec3& u : a.particles) {
    for (const Vec3& v : b.particles) sum += pair_energy(dist2(u, v));
  }
  return sum;
}

EnergyState compute_energy(const std::vector<ParticleDomain>& domains) {
  EnergyState state{EnergyMatrix(domains.size()), 0.0};
  for (std::size_t i = 0; i < domains.size(); ++i) {
    state.matrix.set(i, i, intra_energy(domains[i]));
    for (std::size_t j = i + 1; j < domains.size(); ++j) state.matrix.set(i, j, cross_energy(domains[i], domains[j]));
  }
  state.total = state.matrix.total();
  return state;
}

EnergyUpdate update_energy(const EnergyState& energy, const std::vector<const ParticleDomain*>& domains,
                           std::size_t moved, const ParticleDomain& candidate) {
  const std::size_t n = energy.matrix.size();
  if (moved >= n || domains.size() != n) throw std::out_of_range("moved domain outside the system");
  EnergyUpdate up{moved, std::vector<double>(n), 0.0};
  for (std::size_t j = 0; j < n; ++j) {
    up.row[j] = j == moved ? intra_energy(candidate) : cross_energy(candidate, *domains[j]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      if (i == moved) {
        up.total += up.row[j];
      } else if (j == moved) {
        up.total += up.row[i];
      } else {
        up.total += energy.matrix.at(i, j);
      }
    }
  }
  return up;
}

EnergyUpdate update_energy(const EnergyState& energy, const std::vector<ParticleDomain>& domains, std::size_t moved,
                           const ParticleDomain& candidate) {
  std::vector<const ParticleDomain*> ptrs;
  ptrs.reserve(domains.size());
  for (const ParticleDomain& d : domains) ptrs.push_back(&d);
  return update_energy(energy, ptrs, moved, candidate);
}

void apply_update(EnergyState& energy, const EnergyUpdate& update) {
  for (std::size_t j = 0; j < update.row.size(); ++j) energy.matrix.set(update.moved, j, update.row[j]);
  energy.total = energy.matrix.total();
}

ParticleDomain move_domain(const ParticleDomain& domain, double box_length, const RngKey& key) {
  return random_domain(domain.id, domain.particles.size(), box_length, key);
}

ParticleDomain random_domain(std::size_t id, std::size_t particles, double box_length, const RngKey& key) {
  KeyedStream stream(key);
  ParticleDomain d{id, std::vector<Vec3>(particles)};
  for (Vec3& p : d.particles) {
    p.x = stream.uniform01() * box_length;
    p.y = stream.uniform01() * box_length;
    p.z = stream.uniform01() * box_length;
  }
  return d;
}

bool metropolis_accept(double new_energy, double old_energy, double temperature, double draw) {
  if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be positive");
  const double delta = new_energy - old_energy;
  if (delta <= 0.0) return true;
  return draw <= std::exp(-delta / temperature);
}

bool metropolis_accept(double new_energy, double old_energy, double temperature, const RngKey& key) {
  KeyedStream stream(key);
  return metropolis_accept(new_energy, old_energy, temperature, stream.uniform01());
}

bool exchange_accept(double t_low, double e_low, double t_high, double e_high, double draw) {
  const double delta = (1.0 / t_low - 1.0 / t_high) * (e_low - e_high);
  if (delta >= 0.0) return true;
  return draw <= std::exp(delta);
}

}  // namespace specflow::mc
