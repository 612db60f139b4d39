#pragma once

// Crude Monte Carlo for P(min_i X(t_i) > u) on a grid, with exact Gaussian sampling
// through a Cholesky factor. Path j uses normals from counter stream j, and batches are
// always computed at full width, so estimates are bit-identical for any thread count.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "gaussmin/errors.hpp"
#include "gaussmin/grid.hpp"
#include "gaussmin/kernel.hpp"
#include "gaussmin/parallel.hpp"
#include "gaussmin/random.hpp"
#include "gaussmin/solver.hpp"

namespace gaussmin {

inline constexpr double kDefaultJitter = 1e-12;
inline constexpr double kMaxJitter = 1e-6;
inline constexpr std::size_t kDefaultMcGridSize = 200;

struct CholeskyFactor {
  Eigen::MatrixXd lower;
  double jitter = 0.0;

  Eigen::Index dim() const noexcept { return lower.rows(); }
};

/// Cholesky factor of M + jitter * I. On failure the jitter grows tenfold up to 1e-6.
inline CholeskyFactor factorize(const Eigen::MatrixXd& m, double jitter = kDefaultJitter) {
  if (m.rows() != m.cols() || m.rows() == 0) throw FactorizationError("matrix must be square");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw FactorizationError("matrix is not symmetric");
  }
  if (jitter < 0.0) throw DomainError("jitter must be nonnegative");
  const Eigen::Index n = m.rows();
  for (;;) {
    Eigen::MatrixXd shifted = m;
    shifted.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() == Eigen::Success) {
      Eigen::MatrixXd l = llt.matrixL();
      const double err = (l * l.transpose() - shifted).cwiseAbs().maxCoeff();
      if (l.allFinite() && err <= 1e-8) return {std::move(l), jitter};
    }
    const double next = jitter > 0.0 ? 10.0 * jitter : kDefaultJitter;
    if (next > kMaxJitter * (1.0 + 1e-9)) {
      throw FactorizationError("matrix of size " + std::to_string(n) +
                               " is not positive semidefinite up to jitter 1e-6");
    }
    jitter = next;
  }
}

inline CholeskyFactor factorize(const DiscretizedProblem& problem,
                                double jitter = kDefaultJitter) {
  return factorize(problem.matrix, jitter);
}

namespace detail {

inline constexpr std::size_t kPathBatch = 256;

/// Paths first .. first + kPathBatch - 1 as columns (always full width).
inline Eigen::MatrixXd path_batch(const CholeskyFactor& factor, std::uint64_t first,
                                  const CounterRng& rng) {
  const Eigen::Index n = factor.dim();
  Eigen::MatrixXd z(n, static_cast<Eigen::Index>(kPathBatch));
  for (Eigen::Index c = 0; c < z.cols(); ++c) {
    rng.normals(first + static_cast<std::uint64_t>(c), z.col(c).data(),
                static_cast<std::size_t>(n));
  }
  return factor.lower.triangularView<Eigen::Lower>() * z;
}

}  // namespace detail

/// Simulated paths first_trial .. first_trial + count - 1 as columns.
inline Eigen::MatrixXd sample_paths(const CholeskyFactor& factor, std::uint64_t first_trial,
                                    std::size_t count, std::uint64_t seed) {
  const CounterRng rng(seed);
  Eigen::MatrixXd out(factor.dim(), static_cast<Eigen::Index>(count));
  for (std::size_t done = 0; done < count; done += detail::kPathBatch) {
    const Eigen::MatrixXd x = detail::path_batch(factor, first_trial + done, rng);
    const auto take = static_cast<Eigen::Index>(std::min(detail::kPathBatch, count - done));
    out.middleCols(static_cast<Eigen::Index>(done), take) = x.leftCols(take);
  }
  return out;
}

/// For each threshold, the number of paths among `trials` whose minimum over every
/// `stride`-th coordinate exceeds it. All thresholds share the same paths. `threads` = 0
/// uses worker_count().
inline std::vector<std::size_t> count_exceedances(const CholeskyFactor& factor,
                                                  const std::vector<double>& thresholds,
                                                  std::size_t trials, std::uint64_t seed,
                                                  std::size_t stride = 1,
                                                  std::size_t threads = 0) {
  if (stride < 1) throw DomainError("stride must be at least 1");
  const CounterRng rng(seed);
  const std::size_t batches = (trials + detail::kPathBatch - 1) / detail::kPathBatch;
  std::vector<std::vector<std::size_t>> per_batch(batches);
  parallel_for(batches, [&](std::size_t b) {
    const std::size_t first = b * detail::kPathBatch;
    const std::size_t take = std::min(detail::kPathBatch, trials - first);
    const Eigen::MatrixXd x = detail::path_batch(factor, first, rng);
    std::vector<std::size_t> counts(thresholds.size(), 0);
    for (std::size_t c = 0; c < take; ++c) {
      double mn = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < x.rows(); i += static_cast<Eigen::Index>(stride)) {
        mn = std::min(mn, x(i, static_cast<Eigen::Index>(c)));
      }
      for (std::size_t k = 0; k < thresholds.size(); ++k) {
        if (mn > thresholds[k]) ++counts[k];
      }
    }
    per_batch[b] = std::move(counts);
  }, threads);
  std::vector<std::size_t> total(thresholds.size(), 0);
  for (const auto& counts : per_batch) {
    for (std::size_t k = 0; k < counts.size(); ++k) total[k] += counts[k];
  }
  return total;
}

struct TailEstimate {
  double p_hat = 0.0;
  std::size_t hits = 0;
  std::size_t trials = 0;

  double standard_error() const {
    return std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(trials));
  }
};

/// P(min_i x_i > u) for x = L z; any threshold is allowed at this level.
inline TailEstimate tail_probability(const CholeskyFactor& factor, double u, std::size_t trials,
                                     std::uint64_t seed) {
  if (trials < 1) throw DomainError("trials must be at least 1");
  const auto hits = count_exceedances(factor, {u}, trials, seed).front();
  return {static_cast<double>(hits) / static_cast<double>(trials), hits, trials};
}

/// P(min over an n-node grid on [a,b] of X > u).
inline TailEstimate estimate_tail(const Kernel& kernel, double a, double b, std::size_t n,
                                  double u, std::size_t trials, std::uint64_t seed,
                                  double jitter = kDefaultJitter) {
  if (!(u > 0.0)) throw DomainError("threshold u must be positive");
  if (trials < 1) throw DomainError("trials must be at least 1");
  const auto factor = factorize(discretize(kernel, Grid(a, b, n)), jitter);
  return tail_probability(factor, u, trials, seed);
}

struct LdpEstimate {
  Grid grid;
  std::vector<double> thresholds;
  std::size_t trials = 0;
  std::vector<std::size_t> hits;
  std::vector<double> log_prob;
  std::vector<double> normalized;
  /// 95% normal-approximation half-widths of log p-hat.
  std::vector<double> ci_halfwidth;
  /// True where no path exceeded u and log p-hat was replaced by log(1 / trials).
  std::vector<bool> lower_bound;
  double sigma_sq = 0.0;
  double theoretical_rate = 0.0;
  std::uint64_t seed = 0;
  double jitter = 0.0;

  /// Whether log p-hat / u^2 increases along the thresholds (reported, not enforced).
  bool trend_increasing() const {
    for (std::size_t k = 1; k < normalized.size(); ++k) {
      if (!(normalized[k] > normalized[k - 1])) return false;
    }
    return true;
  }
};

inline LdpEstimate ldp_curve(const Kernel& kernel, double a, double b, std::size_t n,
                             const std::vector<double>& u_list, std::size_t trials,
                             std::uint64_t seed, double sigma_sq,
                             double jitter = kDefaultJitter) {
  if (u_list.empty()) throw DomainError("threshold list is empty");
  for (std::size_t k = 0; k < u_list.size(); ++k) {
    if (!(u_list[k] > 0.0)) throw DomainError("thresholds must be positive");
    if (k > 0 && !(u_list[k] > u_list[k - 1])) {
      throw DomainError("thresholds must be strictly increasing");
    }
  }
  if (trials < 1) throw DomainError("trials must be at least 1");
  if (!(sigma_sq > 0.0)) throw DomainError("sigma^2 must be positive");

  const Grid grid(a, b, n);
  const auto factor = factorize(discretize(kernel, grid), jitter);
  LdpEstimate est{.grid = grid};
  est.thresholds = u_list;
  est.trials = trials;
  est.seed = seed;
  est.sigma_sq = sigma_sq;
  est.theoretical_rate = -1.0 / (2.0 * sigma_sq);
  est.jitter = factor.jitter;
  est.hits = count_exceedances(factor, u_list, trials, seed);

  const double nt = static_cast<double>(trials);
  for (std::size_t k = 0; k < u_list.size(); ++k) {
    const double u = u_list[k];
    const auto hits = est.hits[k];
    const bool zero = hits == 0;
    const double p = zero ? 1.0 / nt : static_cast<double>(hits) / nt;
    est.lower_bound.push_back(zero);
    est.log_prob.push_back(std::log(p));
    est.normalized.push_back(std::log(p) / (u * u));
    est.ci_halfwidth.push_back(zero ? std::numeric_limits<double>::infinity()
                                    : 1.96 * std::sqrt((1.0 - p) / (nt * p)));
  }
  return est;
}

}  // namespace gaussmin
