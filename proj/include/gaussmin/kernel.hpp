#pragma once

// Covariance kernels for the processes handled by the library.
//
// A Kernel is an immutable value. Catalogue kinds:
//   BrownianMotion            R(s,t) = min(s,t)
//   FractionalBM(H)           R(s,t) = (s^2H + t^2H - |t-s|^2H) / 2
//   FractionalGaussianNoise   increments B_H(t+h) - B_H(t), stationary with Gamma(tau)
//   IncrementOf(base, h)      increments Y(t+h) - Y(t) of a catalogue base process
//   Tabulated(grid, matrix)   user covariance matrix, evaluated at grid nodes only
//
// Increment kernels expose the increment function f(t) = V(t+h) - V(t) where V is the
// base variance extended evenly to the whole real line.

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "gaussmin/errors.hpp"
#include "gaussmin/grid.hpp"

namespace gaussmin {

class Kernel;

struct BrownianMotion {};

struct FractionalBM {
  double hurst;
};

struct FractionalGaussianNoise {
  double hurst;
  double lag;
};

struct IncrementOf {
  std::shared_ptr<const Kernel> base;
  double lag;
};

struct Tabulated {
  Grid grid;
  std::shared_ptr<const Eigen::MatrixXd> matrix;
};

namespace detail {

inline void check_hurst(double hurst) {
  if (!(hurst > 0.0 && hurst < 1.0)) {
    throw DomainError("Hurst index must lie in (0, 1), got " + std::to_string(hurst));
  }
}

inline void check_lag(double lag) {
  if (!(lag > 0.0 && std::isfinite(lag))) {
    throw DomainError("lag h must be positive, got " + std::to_string(lag));
  }
}

inline double abs_pow(double x, double p) { return std::pow(std::abs(x), p); }

inline double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace detail

class Kernel {
 public:
  using Spec = std::variant<BrownianMotion, FractionalBM, FractionalGaussianNoise, IncrementOf,
                            Tabulated>;

  static Kernel brownian_motion() { return Kernel(BrownianMotion{}, false); }

  static Kernel fbm(double hurst) {
    detail::check_hurst(hurst);
    return Kernel(FractionalBM{hurst}, false);
  }

  static Kernel fgn(double hurst, double lag) {
    detail::check_hurst(hurst);
    detail::check_lag(lag);
    return Kernel(FractionalGaussianNoise{hurst, lag}, true);
  }

  /// Increment process of `base`; base must have stationary increments (BM or fBm).
  static Kernel increment_of(const Kernel& base, double lag) {
    detail::check_lag(lag);
    if (!base.is<BrownianMotion>() && !base.is<FractionalBM>()) {
      throw KernelKindError("increment kernels require a Brownian or fractional Brownian base");
    }
    return Kernel(IncrementOf{std::make_shared<const Kernel>(base), lag}, true);
  }

  /// Tabulated covariance on grid nodes. The matrix must be symmetric within 1e-12.
  static Kernel tabulated(const Grid& grid, Eigen::MatrixXd matrix) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    if (matrix.rows() != n || matrix.cols() != n) {
      throw GridError("tabulated matrix is " + std::to_string(matrix.rows()) + "x" +
                      std::to_string(matrix.cols()) + " but grid has " +
                      std::to_string(grid.size()) + " nodes");
    }
    if (!matrix.allFinite()) throw DomainError("tabulated matrix has non-finite entries");
    if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
      throw DomainError("tabulated matrix is not symmetric within 1e-12");
    }
    bool toeplitz = true;
    for (Eigen::Index i = 1; i < n && toeplitz; ++i) {
      for (Eigen::Index j = 1; j < n; ++j) {
        if (std::abs(matrix(i, j) - matrix(i - 1, j - 1)) > 1e-12) {
          toeplitz = false;
          break;
        }
      }
    }
    return Kernel(Tabulated{grid, std::make_shared<const Eigen::MatrixXd>(std::move(matrix))},
                  toeplitz);
  }

  const Spec& spec() const noexcept { return spec_; }

  template <class Kind>
  bool is() const noexcept {
    return std::holds_alternative<Kind>(spec_);
  }

  template <class Kind>
  const Kind& as() const {
    return std::get<Kind>(spec_);
  }

  /// True iff R(s,t) depends only on t - s.
  bool stationary() const noexcept { return stationary_; }

  /// True for increment kernels (fGn, IncrementOf).
  bool is_increment() const noexcept {
    return is<FractionalGaussianNoise>() || is<IncrementOf>();
  }

  std::optional<double> lag() const noexcept {
    if (const auto* g = std::get_if<FractionalGaussianNoise>(&spec_)) return g->lag;
    if (const auto* inc = std::get_if<IncrementOf>(&spec_)) return inc->lag;
    return std::nullopt;
  }

  /// Base process whose increments this kernel describes (fBm(H) for fGn).
  std::optional<Kernel> base() const {
    if (const auto* g = std::get_if<FractionalGaussianNoise>(&spec_)) return fbm(g->hurst);
    if (const auto* inc = std::get_if<IncrementOf>(&spec_)) return *inc->base;
    return std::nullopt;
  }

  std::string describe() const {
    std::ostringstream os;
    std::visit(
        [&os](const auto& k) {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, BrownianMotion>) {
            os << "BrownianMotion";
          } else if constexpr (std::is_same_v<K, FractionalBM>) {
            os << "FractionalBM(H=" << k.hurst << ")";
          } else if constexpr (std::is_same_v<K, FractionalGaussianNoise>) {
            os << "FractionalGaussianNoise(H=" << k.hurst << ", h=" << k.lag << ")";
          } else if constexpr (std::is_same_v<K, IncrementOf>) {
            os << "IncrementOf(" << k.base->describe() << ", h=" << k.lag << ")";
          } else {
            os << "Tabulated(n=" << k.grid.size() << " on [" << k.grid.a() << ", " << k.grid.b()
               << "])";
          }
        },
        spec_);
    return os.str();
  }

 private:
  Kernel(Spec spec, bool stationary) : spec_(std::move(spec)), stationary_(stationary) {}

  Spec spec_;
  bool stationary_;
};

// ---------------------------------------------------------------------------
// Variance, covariance, Gamma

namespace detail {

inline std::size_t tabulated_index(const Tabulated& tab, double t) {
  const auto idx = tab.grid.index_of(t);
  if (!idx) {
    throw GridError("tabulated kernel queried off-grid at t=" + std::to_string(t));
  }
  return *idx;
}

inline void check_nonnegative_time(double s, double t) {
  if (s < 0.0 || t < 0.0 || std::isnan(s) || std::isnan(t)) {
    throw DomainError("process is defined on [0, inf); got (" + std::to_string(s) + ", " +
                      std::to_string(t) + ")");
  }
}

inline double fgn_gamma(double hurst, double lag, double tau) {
  tau = std::abs(tau);
  const double p = 2.0 * hurst;
  return 0.5 * (abs_pow(tau - lag, p) - 2.0 * abs_pow(tau, p) + abs_pow(tau + lag, p));
}

}  // namespace detail

/// Variance function V(t) of a base process, extended evenly: V(t) = V(-t).
inline double base_variance(const Kernel& base, double t) {
  if (base.is<BrownianMotion>()) return std::abs(t);
  if (base.is<FractionalBM>()) return detail::abs_pow(t, 2.0 * base.as<FractionalBM>().hurst);
  throw KernelKindError("variance function V is defined for BM and fBm bases, not " +
                        base.describe());
}

inline double eval_covariance(const Kernel& kernel, double s, double t);

/// Increment function f(t) = V(t+h) - V(t) with V extended evenly.
inline double increment_function(const Kernel& kernel, double t) {
  if (kernel.is<FractionalGaussianNoise>()) {
    const auto& g = kernel.as<FractionalGaussianNoise>();
    const double p = 2.0 * g.hurst;
    return detail::abs_pow(t + g.lag, p) - detail::abs_pow(t, p);
  }
  if (kernel.is<IncrementOf>()) {
    const auto& inc = kernel.as<IncrementOf>();
    return base_variance(*inc.base, t + inc.lag) - base_variance(*inc.base, t);
  }
  throw KernelKindError("increment function requires an increment kernel, got " +
                        kernel.describe());
}

/// Central-difference step used for generic derivatives.
inline double finite_difference_step(double t) { return std::max(1e-5, 1e-7 * std::abs(t)); }

template <class F>
double central_first_derivative(F&& f, double t, double step) {
  return (f(t + step) - f(t - step)) / (2.0 * step);
}

template <class F>
double central_second_derivative(F&& f, double t, double step) {
  return (f(t + step) - 2.0 * f(t) + f(t - step)) / (step * step);
}

namespace detail {

inline void check_fgn_singular(const FractionalGaussianNoise& g, double t) {
  if (t == 0.0 || t + g.lag == 0.0) {
    throw SingularityError("analytic increment-function derivative is singular at t=" +
                           std::to_string(t));
  }
}

}  // namespace detail

/// f'(t): analytic for fGn, central differences for generic increment kernels.
inline double increment_function_d1(const Kernel& kernel, double t) {
  if (kernel.is<FractionalGaussianNoise>()) {
    const auto& g = kernel.as<FractionalGaussianNoise>();
    detail::check_fgn_singular(g, t);
    const double q = 2.0 * g.hurst - 1.0;
    return 2.0 * g.hurst *
           (detail::sign(t + g.lag) * detail::abs_pow(t + g.lag, q) -
            detail::sign(t) * detail::abs_pow(t, q));
  }
  if (kernel.is<IncrementOf>()) {
    return central_first_derivative([&](double x) { return increment_function(kernel, x); }, t,
                                    finite_difference_step(t));
  }
  throw KernelKindError("increment function requires an increment kernel, got " +
                        kernel.describe());
}

/// f''(t) = 2H(2H-1)(|t+h|^(2H-2) - |t|^(2H-2)) for fGn; central differences otherwise.
inline double increment_function_d2(const Kernel& kernel, double t) {
  if (kernel.is<FractionalGaussianNoise>()) {
    const auto& g = kernel.as<FractionalGaussianNoise>();
    detail::check_fgn_singular(g, t);
    const double coeff = 2.0 * g.hurst * (2.0 * g.hurst - 1.0);
    if (coeff == 0.0) return 0.0;
    const double q = 2.0 * g.hurst - 2.0;
    return coeff * (detail::abs_pow(t + g.lag, q) - detail::abs_pow(t, q));
  }
  if (kernel.is<IncrementOf>()) {
    return central_second_derivative([&](double x) { return increment_function(kernel, x); }, t,
                                     finite_difference_step(t));
  }
  throw KernelKindError("increment function requires an increment kernel, got " +
                        kernel.describe());
}

/// Points where analytic increment-function derivatives blow up ({0, -h}); empty otherwise.
inline std::vector<double> singular_points(const Kernel& kernel) {
  if (const auto h = kernel.lag()) return {-*h, 0.0};
  return {};
}

/// Stationary covariance Gamma(tau) = R(s, s + tau).
inline double gamma(const Kernel& kernel, double tau) {
  if (!kernel.stationary()) {
    throw StationarityError("Gamma(tau) requires a stationary kernel, got " + kernel.describe());
  }
  if (kernel.is<FractionalGaussianNoise>()) {
    const auto& g = kernel.as<FractionalGaussianNoise>();
    return detail::fgn_gamma(g.hurst, g.lag, tau);
  }
  if (kernel.is<IncrementOf>()) {
    const double a = std::abs(tau);
    return 0.5 * (increment_function(kernel, a) + increment_function(kernel, -a));
  }
  const auto& tab = kernel.as<Tabulated>();
  return eval_covariance(kernel, tab.grid.a(), tab.grid.a() + std::abs(tau));
}

/// R(s,t). Arguments are ordered internally so the result is exactly symmetric.
inline double eval_covariance(const Kernel& kernel, double s, double t) {
  if (s > t) std::swap(s, t);
  return std::visit(
      [s, t](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, BrownianMotion>) {
          detail::check_nonnegative_time(s, t);
          return s;
        } else if constexpr (std::is_same_v<K, FractionalBM>) {
          detail::check_nonnegative_time(s, t);
          if (k.hurst == 0.5) return s;
          const double p = 2.0 * k.hurst;
          return 0.5 * (std::pow(s, p) + std::pow(t, p) - std::pow(t - s, p));
        } else if constexpr (std::is_same_v<K, FractionalGaussianNoise>) {
          return detail::fgn_gamma(k.hurst, k.lag, t - s);
        } else if constexpr (std::is_same_v<K, IncrementOf>) {
          detail::check_nonnegative_time(s, t);
          const Kernel& y = *k.base;
          const double h = k.lag;
          return eval_covariance(y, s + h, t + h) - eval_covariance(y, s, t + h) -
                 eval_covariance(y, t, s + h) + eval_covariance(y, s, t);
        } else {
          const auto i = detail::tabulated_index(k, s);
          const auto j = detail::tabulated_index(k, t);
          return (*k.matrix)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
      },
      kernel.spec());
}

/// |R_inc(s,t) - (f(t-s) + f(s-t)) / 2| for the lag-h increments of `base`, where R_inc is
/// expanded from four base covariances and f from the evenly extended base variance.
inline double decomposition_residual(const Kernel& base, double h, double s, double t) {
  const Kernel inc = Kernel::increment_of(base, h);
  const double direct = eval_covariance(base, s + h, t + h) - eval_covariance(base, s, t + h) -
                        eval_covariance(base, t, s + h) + eval_covariance(base, s, t);
  const double via_f = 0.5 * (increment_function(inc, t - s) + increment_function(inc, s - t));
  return std::abs(direct - via_f);
}

/// Sampled f, f', f'' on a set of points (singular points are the caller's concern).
struct IncrementFunctionProfile {
  double lag = 0.0;
  std::vector<double> points;
  std::vector<double> f;
  std::vector<double> d1;
  std::vector<double> d2;
};

inline IncrementFunctionProfile increment_profile(const Kernel& kernel,
                                                  std::vector<double> points) {
  const auto h = kernel.lag();
  if (!h) throw KernelKindError("increment profile requires an increment kernel");
  IncrementFunctionProfile prof;
  prof.lag = *h;
  prof.f.reserve(points.size());
  prof.d1.reserve(points.size());
  prof.d2.reserve(points.size());
  for (double t : points) {
    prof.f.push_back(increment_function(kernel, t));
    prof.d1.push_back(increment_function_d1(kernel, t));
    prof.d2.push_back(increment_function_d2(kernel, t));
  }
  prof.points = std::move(points);
  return prof;
}

/// Covariance between X(t1)-X(s1) and X(t2)-X(s2).
inline double increment_covariance(const Kernel& kernel, double s1, double t1, double s2,
                                   double t2) {
  return eval_covariance(kernel, t1, t2) - eval_covariance(kernel, t1, s2) -
         eval_covariance(kernel, s1, t2) + eval_covariance(kernel, s1, s2);
}

}  // namespace gaussmin
