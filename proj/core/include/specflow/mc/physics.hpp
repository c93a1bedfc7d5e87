#pragma once

#include <cstddef>
#include <vector>

#include "specflow/mc/rng.hpp"

namespace specflow::mc {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

struct ParticleDomain {
  std::size_t id = 0;
  std::vector<Vec3> particles;

  friend bool operator==(const ParticleDomain&, const ParticleDomain&) = default;
};

/// Dense symmetric matrix of domain-domain interaction energies; the diagonal
/// holds intra-domain energies.
class EnergyMatrix {
 public:
  EnergyMatrix() = default;
  explicit EnergyMatrix(std::size_t n) : n_(n), values_(n * n, 0.0) {}

  [[nodiscard]] std::size_t size() const { return n_; }
  [[nodiscard]] double at(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, double v) {
    values_[i * n_ + j] = v;
    values_[j * n_ + i] = v;
  }
  /// Sum over i <= j.
  [[nodiscard]] double total() const;

  friend bool operator==(const EnergyMatrix&, const EnergyMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

struct EnergyState {
  EnergyMatrix matrix;
  double total = 0.0;

  friend bool operator==(const EnergyState&, const EnergyState&) = default;
};

/// Lennard-Jones pair potential with unit well depth and size, from the squared distance.
/// Throws std::domain_error for coincident particles.
[[nodiscard]] double pair_energy(double r2);

[[nodiscard]] double intra_energy(const ParticleDomain& d);
[[nodiscard]] double cross_energy(const ParticleDomain& a, const ParticleDomain& b);

/// Full pairwise computation.
[[nodiscard]] EnergyState compute_energy(const std::vector<ParticleDomain>& domains);

/// Energies after replacing domain `moved` with `candidate`; the state is not modified.
struct EnergyUpdate {
  std::size_t moved = 0;
  std::vector<double> row;
  double total = 0.0;
};
[[nodiscard]] EnergyUpdate update_energy(const EnergyState& energy, const std::vector<const ParticleDomain*>& domains,
                                         std::size_t moved, const ParticleDomain& candidate);
[[nodiscard]] EnergyUpdate update_energy(const EnergyState& energy, const std::vector<ParticleDomain>& domains,
                                         std::size_t moved, const ParticleDomain& candidate);

void apply_update(EnergyState& energy, const EnergyUpdate& update);

/// Every particle redrawn uniformly in [0, box)^3 from the keyed stream.
[[nodiscard]] ParticleDomain move_domain(const ParticleDomain& domain, double box_length, const RngKey& key);
[[nodiscard]] ParticleDomain random_domain(std::size_t id, std::size_t particles, double box_length,
                                           const RngKey& key);

/// Accepts iff `draw` <= min(1, exp(-(new - old) / temperature)).
[[nodiscard]] bool metropolis_accept(double new_energy, double old_energy, double temperature, double draw);
[[nodiscard]] bool metropolis_accept(double new_energy, double old_energy, double temperature, const RngKey& key);

/// Parallel-tempering swap test between neighbours at temperatures t_low, t_high
/// holding energies e_low, e_high.
[[nodiscard]] bool exchange_accept(double t_low, double e_low, double t_high, double e_high, double draw);

}  // namespace specflow::mc
