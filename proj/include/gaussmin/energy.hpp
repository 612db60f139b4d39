#pragma once

// Energy functional, potential and the equilibrium optimality check.
//
// For a probability measure mu on [a,b]:
//   energy(mu)  = sum_ij w_i w_j R(x_i, x_j)
//   phi_mu(t)   = sum_j w_j R(x_j, t)
// mu is optimal iff min_t phi_mu(t) = energy(mu) = phi_mu(x) at every atom x.

#include <cmath>
#include <limits>
#include <vector>

#include "gaussmin/errors.hpp"
#include "gaussmin/grid.hpp"
#include "gaussmin/kernel.hpp"
#include "gaussmin/measure.hpp"

namespace gaussmin {

inline constexpr double kClosedFormTolerance = 1e-8;
inline constexpr double kSolverTolerance = 1e-5;
inline constexpr std::size_t kDefaultGridSize = 401;

inline double energy(const Kernel& kernel, const DiscreteMeasure& mu) {
  const auto& atoms = mu.atoms();
  double diag = 0.0;
  double off = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto& ai = atoms[i];
    diag += ai.weight * ai.weight * eval_covariance(kernel, ai.location, ai.location);
    for (std::size_t j = i + 1; j < atoms.size(); ++j) {
      off += ai.weight * atoms[j].weight * eval_covariance(kernel, ai.location, atoms[j].location);
    }
  }
  return diag + 2.0 * off;
}

inline double potential_at(const Kernel& kernel, const DiscreteMeasure& mu, double t) {
  double phi = 0.0;
  for (const auto& at : mu.atoms()) phi += at.weight * eval_covariance(kernel, at.location, t);
  return phi;
}

struct PotentialProfile {
  Grid grid;
  std::vector<double> values;
};

inline PotentialProfile potential(const Kernel& kernel, const DiscreteMeasure& mu,
                                  const Grid& grid) {
  PotentialProfile prof{grid, std::vector<double>(grid.size())};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    prof.values[i] = potential_at(kernel, mu, grid.node(i));
  }
  return prof;
}

struct OptimalityReport {
  double energy = 0.0;
  double min_potential = 0.0;
  double argmin = 0.0;
  /// max over atoms of |phi(atom) - energy|
  double support_deviation = 0.0;
  /// min over grid of phi(t) - energy
  double global_slack = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  PotentialProfile profile;
};

/// Executable form of the equilibrium characterization. The minimum of phi is searched on
/// the grid; the support condition is checked at the atoms themselves.
inline OptimalityReport check_optimality(const Kernel& kernel, const DiscreteMeasure& mu,
                                         const Grid& grid, double tol = kClosedFormTolerance) {
  if (!(tol > 0.0)) throw DomainError("verification tolerance must be positive");
  OptimalityReport rep{.profile = potential(kernel, mu, grid)};
  rep.tolerance = tol;
  rep.energy = energy(kernel, mu);

  rep.min_potential = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (rep.profile.values[i] < rep.min_potential) {
      rep.min_potential = rep.profile.values[i];
      rep.argmin = grid.node(i);
    }
  }
  rep.global_slack = rep.min_potential - rep.energy;

  for (const auto& at : mu.atoms()) {
    const double dev = std::abs(potential_at(kernel, mu, at.location) - rep.energy);
    rep.support_deviation = std::max(rep.support_deviation, dev);
  }
  rep.passed = rep.support_deviation <= tol && rep.global_slack >= -tol;
  return rep;
}

/// Large-deviations rate -1 / (2 sigma^2).
inline double rate(double sigma_sq) {
  if (!(sigma_sq > 0.0) || !std::isfinite(sigma_sq)) {
    throw DomainError("rate requires sigma^2 > 0, got " + std::to_string(sigma_sq));
  }
  return -1.0 / (2.0 * sigma_sq);
}

}  // namespace gaussmin
