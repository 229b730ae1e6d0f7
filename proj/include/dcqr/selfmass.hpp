#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcqr/eigensolver.hpp"

namespace dcqr {

/// Linear (Kane-type) energy dependence of the ring effective mass: the straight line
/// from the bulk well mass at the band bottom to the bulk barrier mass at the well depth.
struct MassModel {
  double m_well = 0.0;
  double m_barrier = 0.0;
  double well_depth = 0.0;  // meV

  static MassModel from(const MaterialParams& p) { return {p.m_well, p.m_barrier, p.band_offset}; }

  /// dm/dE on the linear segment (1/meV).
  double slope() const { return (m_barrier - m_well) / well_depth; }

  double mass_of_energy(double energy) const {
    const double x = std::clamp(energy / well_depth, 0.0, 1.0);
    return m_well + (m_barrier - m_well) * x;
  }
};

struct SelfConsistentOptions {
  double tol = 0.01;  // meV
  int max_iter = 12;
  EigenOptions eigen{};
};

struct SelfConsistentResult {
  EigenState state;
  double converged_mass = 0.0;
  int iterations = 0;
  std::vector<double> energy_history;  // meV, one entry per eigen solve
  bool damped = false;
};

class SelfConsistencyError : public std::runtime_error {
 public:
  SelfConsistencyError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), history_(std::move(history)) {}
  const std::vector<double>& history() const { return history_; }

 private:
  std::vector<double> history_;
};

namespace detail {

inline bool oscillates(const std::vector<double>& h) {
  if (h.size() < 4) return false;
  const auto n = h.size();
  const double d1 = h[n - 1] - h[n - 2], d2 = h[n - 2] - h[n - 3];
  return d1 * d2 < 0.0 && std::abs(d1) >= std::abs(d2);
}

inline SelfConsistentResult iterate_mass(const DeviceSpec& spec, const Grid& grid, int l, double field,
                                         int n, const SelfConsistentOptions& opt, double damping) {
  const auto model = MassModel::from(spec.material);
  const double mass_tol = model.slope() * opt.tol;
  SelfConsistentResult result;
  double mass = model.m_well;
  for (int it = 1; it <= opt.max_iter; ++it) {
    const auto op = assemble(grid, spec, sample_mass(spec, grid, mass), l, field);
    auto states = lowest_eigenpairs(op, n, opt.eigen);
    const double energy = states[static_cast<std::size_t>(n - 1)].energy;
    result.energy_history.push_back(energy);
    const double target = model.mass_of_energy(energy);
    // |f(E_k) - m_k| = slope |E_k - E_{k-1}| on the linear segment
    if (std::abs(target - mass) <= mass_tol) {
      result.state = std::move(states[static_cast<std::size_t>(n - 1)]);
      result.converged_mass = mass;
      result.iterations = it;
      result.damped = damping != 1.0;
      return result;
    }
    if (damping == 1.0 && oscillates(result.energy_history)) break;
    mass += damping * (target - mass);
  }
  throw SelfConsistencyError("effective-mass iteration did not converge", result.energy_history);
}

}  // namespace detail

/// Self-consistent energy and ring mass of the n-th state (1-based) with orbital number l.
///
/// Each step solves the fixed-mass problem, reads the n-th energy, and moves the ring
/// mass to mass_of_energy(E). Stops once the mass update is below slope * tol, which is
/// |E_k - E_{k-1}| <= tol. Runs undamped; if that oscillates or runs out of steps, it is
/// retried once with a 0.5 damped update.
inline SelfConsistentResult solve_self_consistent(const DeviceSpec& spec, const Grid& grid, int l, double field,
                                                  int n, SelfConsistentOptions opt = {}) {
  if (!(opt.tol > 0.0) || opt.max_iter < 1 || n < 1) throw std::invalid_argument("solve_self_consistent: bad options");
  try {
    return detail::iterate_mass(spec, grid, l, field, n, opt, 1.0);
  } catch (const SelfConsistencyError&) {
    return detail::iterate_mass(spec, grid, l, field, n, opt, 0.5);
  }
}

}  // namespace dcqr
