#pragma once

// Data for the six diagnostic curves of an increment kernel: f, f', f'' on [-L, L],
// Gamma on [0, 3h], and gamma, gamma' on (0, h).

#include <array>
#include <string>
#include <vector>

#include "gaussmin/audit.hpp"
#include "gaussmin/grid.hpp"
#include "gaussmin/kernel.hpp"
#include "gaussmin/measure.hpp"

namespace gaussmin {

struct Curve {
  std::string name;
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<double> xs;
  std::vector<double> ys;
};

struct FigureOptions {
  std::size_t n = 601;
  /// Half-width of the range for f, f', f''; <= 0 means 3h.
  double half_range = 0.0;
  std::size_t gamma_nodes = 1001;
};

inline std::array<Curve, 6> figure_curves(const Kernel& kernel, const FigureOptions& opt = {}) {
  const auto lag = kernel.lag();
  if (!lag) throw KernelKindError("figures require an increment kernel, got " + kernel.describe());
  const double h = *lag;
  const double half = opt.half_range > 0.0 ? opt.half_range : 3.0 * h;
  const Grid sym(-half, half, opt.n);
  const auto singular = singular_points(kernel);
  const std::string tag = kernel.describe();

  std::array<Curve, 6> c{{
      {"fig1_increment_function", "increment function f, " + tag, "t", "f"},
      {"fig2_increment_function_d1", "first derivative f', " + tag, "t", "f_prime"},
      {"fig3_increment_function_d2", "second derivative f'', " + tag, "t", "f_second"},
      {"fig4_covariance", "covariance Gamma, " + tag, "tau", "Gamma"},
      {"fig5_gamma", "gamma on (0,h), " + tag, "t", "gamma"},
      {"fig6_gamma_d1", "gamma' on (0,h), " + tag, "t", "gamma_prime"},
  }};

  for (std::size_t i = 0; i < sym.size(); ++i) {
    const double t = sym.node(i);
    c[0].xs.push_back(t);
    c[0].ys.push_back(increment_function(kernel, t));
    bool skip = false;
    for (double p : singular) skip = skip || std::abs(t - p) < 0.5 * sym.step();
    if (skip) continue;
    c[1].xs.push_back(t);
    c[1].ys.push_back(increment_function_d1(kernel, t));
    c[2].xs.push_back(t);
    c[2].ys.push_back(increment_function_d2(kernel, t));
  }

  const Grid cov(0.0, 3.0 * h, opt.n);
  for (std::size_t i = 0; i < cov.size(); ++i) {
    c[3].xs.push_back(cov.node(i));
    c[3].ys.push_back(gamma(kernel, cov.node(i)));
  }

  const double cs = c_star(kernel, h);
  for (double t : open_interval_nodes(h, opt.gamma_nodes)) {
    c[4].xs.push_back(t);
    c[4].ys.push_back(gamma_fn(kernel, h, cs, t));
    c[5].xs.push_back(t);
    c[5].ys.push_back(gamma_fn_d1(kernel, h, cs, t));
  }
  return c;
}

/// Sign changes of the values themselves (zeros skipped).
inline int value_sign_changes(const std::vector<double>& ys) {
  std::vector<int> signs;
  signs.reserve(ys.size());
  for (double y : ys) signs.push_back(y > 0.0 ? 1 : (y < 0.0 ? -1 : 0));
  return count_sign_changes(signs);
}

}  // namespace gaussmin
