#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "gaussmin/errors.hpp"

namespace gaussmin {

/// Uniform discretization of [a, b] with n >= 2 nodes; the last node is b exactly.
class Grid {
 public:
  Grid(double a, double b, std::size_t n) : a_(a), b_(b), n_(n) {
    if (!(std::isfinite(a) && std::isfinite(b)) || !(a < b)) {
      throw IntervalError("grid requires finite a < b, got [" + std::to_string(a) + ", " +
                          std::to_string(b) + "]");
    }
    if (n < 2) throw GridError("grid requires at least 2 nodes");
  }

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  std::size_t size() const noexcept { return n_; }
  double step() const noexcept { return (b_ - a_) / static_cast<double>(n_ - 1); }

  double node(std::size_t i) const noexcept {
    if (i + 1 == n_) return b_;
    return a_ + static_cast<double>(i) * (b_ - a_) / static_cast<double>(n_ - 1);
  }

  std::vector<double> nodes() const {
    std::vector<double> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = node(i);
    return out;
  }

  /// Index of the node within `rel_tol * step()` of t, if any.
  std::optional<std::size_t> index_of(double t, double rel_tol = 1e-9) const noexcept {
    const double h = step();
    const double pos = (t - a_) / h;
    if (!(pos > -0.5 && pos < static_cast<double>(n_) - 0.5)) return std::nullopt;
    const auto i = static_cast<std::size_t>(std::llround(pos));
    if (std::abs(node(i) - t) <= rel_tol * h) return i;
    return std::nullopt;
  }

  bool contains(double t) const noexcept { return t >= a_ && t <= b_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  double a_;
  double b_;
  std::size_t n_;
};

}  // namespace gaussmin
