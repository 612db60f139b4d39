#pragma once

// Discretized minimum-energy problem: minimize w' M w over the probability simplex,
// M_ij = R(t_i, t_j) on a grid. Solved with away-step Frank-Wolfe and exact line search.
// The Frank-Wolfe gap <g, w> - min_i g_i with g = 2Mw equals 2 (energy - min_i phi_i),
// i.e. the discrete equilibrium defect.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "gaussmin/errors.hpp"
#include "gaussmin/grid.hpp"
#include "gaussmin/kernel.hpp"
#include "gaussmin/measure.hpp"

namespace gaussmin {

inline constexpr double kDefaultSolverTol = 1e-9;
inline constexpr std::size_t kDefaultMaxIter = 200000;
inline constexpr double kDefaultPrune = 1e-4;

struct DiscretizedProblem {
  Grid grid;
  Eigen::MatrixXd matrix;
};

inline DiscretizedProblem discretize(const Kernel& kernel, const Grid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  const auto nodes = grid.nodes();
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      m(i, j) = eval_covariance(kernel, nodes[static_cast<std::size_t>(i)],
                                nodes[static_cast<std::size_t>(j)]);
    }
  }
  m.triangularView<Eigen::StrictlyLower>() = m.transpose().triangularView<Eigen::StrictlyLower>();
  if ((m.diagonal().array() < 0.0).any()) throw DomainError("covariance has negative variance");
  return {grid, std::move(m)};
}

/// Wraps an explicit matrix (tests, tabulated inputs). Symmetrized by averaging with M'.
inline DiscretizedProblem make_problem(const Grid& grid, const Eigen::MatrixXd& m) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  if (m.rows() != n || m.cols() != n) throw GridError("matrix size does not match grid");
  Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  if ((sym.diagonal().array() < 0.0).any()) throw DomainError("covariance has negative variance");
  return {grid, std::move(sym)};
}

struct SolverResult {
  std::vector<double> weights;
  double energy = 0.0;
  double equilibrium_gap = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

namespace detail {

inline Eigen::Index first_argmin(const Eigen::VectorXd& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v[i] < v[best]) best = i;
  }
  return best;
}

}  // namespace detail

/// Away-step Frank-Wolfe from uniform weights. Stops once the gap is <= tol or after
/// max_iter steps. Ties pick the lowest index. If `energy_trace` is given it receives the
/// energy after every step (nonincreasing).
inline SolverResult solve(const DiscretizedProblem& problem, double tol = kDefaultSolverTol,
                          std::size_t max_iter = kDefaultMaxIter,
                          std::vector<double>* energy_trace = nullptr) {
  if (!(tol > 0.0)) throw DomainError("solver tolerance must be positive");
  if (max_iter < 1) throw DomainError("max_iter must be at least 1");

  const Eigen::MatrixXd& m = problem.matrix;
  const Eigen::Index n = m.rows();
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  Eigen::VectorXd mw = m * w;
  double e = w.dot(mw);
  constexpr std::size_t kRefreshEvery = 1000;

  if (energy_trace) {
    energy_trace->clear();
    energy_trace->push_back(e);
  }

  std::size_t it = 0;
  for (; it < max_iter; ++it) {
    if (it % kRefreshEvery == 0) mw.noalias() = m * w;
    const Eigen::Index s = detail::first_argmin(mw);
    double wmw = w.dot(mw);
    double fw_gap = 2.0 * (wmw - mw[s]);
    if (fw_gap <= tol) {
      mw.noalias() = m * w;
      wmw = w.dot(mw);
      fw_gap = 2.0 * (wmw - mw[detail::first_argmin(mw)]);
      if (fw_gap <= tol) break;
    }

    Eigen::Index v = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (w[i] > 0.0 && (v < 0 || mw[i] > mw[v])) v = i;
    }
    const double away_gap = 2.0 * (mw[v] - wmw);

    // Directional quantities for f(w) = w'Mw: f(w + g d) = f + g <2Mw, d> + g^2 d'Md.
    const bool toward = fw_gap >= away_gap || w[v] >= 1.0;
    double gd = 0.0;
    double dmd = 0.0;
    double gmax = 1.0;
    if (toward) {
      gd = -fw_gap;
      dmd = m(s, s) - 2.0 * mw[s] + wmw;
    } else {
      gd = -away_gap;
      dmd = wmw - 2.0 * mw[v] + m(v, v);
      gmax = w[v] / (1.0 - w[v]);
    }
    double step = dmd > 0.0 ? std::min(gmax, -gd / (2.0 * dmd)) : gmax;
    if (!(step > 0.0)) break;

    if (toward) {
      w *= 1.0 - step;
      w[s] += step;
      mw = (1.0 - step) * mw + step * m.col(s);
    } else {
      w *= 1.0 + step;
      w[v] -= step;
      if (step == gmax) w[v] = 0.0;
      mw = (1.0 + step) * mw - step * m.col(v);
    }
    e += step * (gd + step * dmd);
    if (energy_trace) energy_trace->push_back(e);
  }

  w = w.cwiseMax(0.0);
  w /= w.sum();
  mw.noalias() = m * w;
  SolverResult res;
  res.energy = w.dot(mw);
  res.equilibrium_gap = std::max(0.0, 2.0 * res.energy - 2.0 * mw.minCoeff());
  res.iterations = it;
  res.converged = res.equilibrium_gap <= tol;
  res.weights.assign(w.data(), w.data() + n);
  return res;
}

/// Potential phi_i = (M w)_i of solver weights on the grid.
inline std::vector<double> solver_potential(const DiscretizedProblem& problem,
                                            const std::vector<double>& weights) {
  const Eigen::Map<const Eigen::VectorXd> w(weights.data(),
                                            static_cast<Eigen::Index>(weights.size()));
  const Eigen::VectorXd phi = problem.matrix * w;
  return {phi.data(), phi.data() + phi.size()};
}

/// Atoms at nodes with weight > prune, renormalized. Runs of adjacent surviving nodes are
/// merged into one atom at their weight-weighted centroid.
inline DiscreteMeasure extract_measure(const SolverResult& result, const Grid& grid,
                                       double prune = kDefaultPrune) {
  if (!(prune >= 0.0 && prune <= 0.01)) throw DomainError("prune must lie in [0, 0.01]");
  if (result.weights.size() != grid.size()) throw GridError("weights do not match grid size");

  std::vector<Atom> atoms;
  double mass = 0.0;
  double moment = 0.0;
  bool open = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double w = result.weights[i];
    if (w > prune) {
      mass += w;
      moment += w * grid.node(i);
      open = true;
    } else if (open) {
      atoms.push_back({moment / mass, mass});
      mass = moment = 0.0;
      open = false;
    }
  }
  if (open) atoms.push_back({moment / mass, mass});
  if (atoms.empty()) throw EmptyMeasureError("every solver weight was pruned");

  double total = 0.0;
  for (const auto& at : atoms) total += at.weight;
  for (auto& at : atoms) at.weight /= total;
  return DiscreteMeasure::from_atoms(std::move(atoms), grid.b() - grid.a());
}

}  // namespace gaussmin
