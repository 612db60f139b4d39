#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "gaussmin/errors.hpp"
#include "gaussmin/kernel.hpp"

namespace gaussmin {

struct Atom {
  double location;
  double weight;

  friend bool operator==(const Atom&, const Atom&) = default;
};

/// Finitely supported probability measure: sorted distinct locations, positive weights
/// summing to one.
class DiscreteMeasure {
 public:
  static constexpr double kMergeTolerance = 1e-12;
  static constexpr double kPruneThreshold = 1e-12;
  static constexpr double kSumTolerance = 1e-9;

  /// Normalizes raw atoms: sorts, merges locations closer than 1e-12 * scale, drops
  /// weights <= 1e-12 and renormalizes. `scale` defaults to the span of the locations.
  static DiscreteMeasure from_atoms(std::vector<Atom> atoms, double scale = 0.0) {
    if (atoms.empty()) throw EmptyMeasureError("measure has no atoms");
    for (const auto& at : atoms) {
      if (!std::isfinite(at.location) || !std::isfinite(at.weight)) {
        throw DomainError("atom location and weight must be finite");
      }
      if (at.weight < 0.0) throw DomainError("atom weights must be nonnegative");
    }
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& x, const Atom& y) { return x.location < y.location; });
    if (scale <= 0.0) scale = std::max(1.0, atoms.back().location - atoms.front().location);
    const double merge_tol = kMergeTolerance * scale;

    std::vector<Atom> merged;
    merged.reserve(atoms.size());
    for (const auto& at : atoms) {
      if (!merged.empty() && at.location - merged.back().location <= merge_tol) {
        merged.back().weight += at.weight;
      } else {
        merged.push_back(at);
      }
    }
    std::erase_if(merged, [](const Atom& at) { return at.weight <= kPruneThreshold; });
    if (merged.empty()) throw EmptyMeasureError("all atom weights are below the prune threshold");

    double total = 0.0;
    for (const auto& at : merged) total += at.weight;
    if (std::abs(total - 1.0) > kSumTolerance) {
      throw DomainError("atom weights sum to " + std::to_string(total) + ", expected 1");
    }
    if (total != 1.0) {
      for (auto& at : merged) at.weight /= total;
    }
    DiscreteMeasure mu;
    mu.atoms_ = std::move(merged);
    return mu;
  }

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  double lower() const noexcept { return atoms_.front().location; }
  double upper() const noexcept { return atoms_.back().location; }

  double total_weight() const noexcept {
    double s = 0.0;
    for (const auto& at : atoms_) s += at.weight;
    return s;
  }

  friend bool operator==(const DiscreteMeasure&, const DiscreteMeasure&) = default;

 private:
  DiscreteMeasure() = default;
  std::vector<Atom> atoms_;
};

inline DiscreteMeasure dirac(double a) { return DiscreteMeasure::from_atoms({{a, 1.0}}); }

/// (delta_a + delta_b) / 2.
inline DiscreteMeasure two_point(double a, double b) {
  if (!(a < b)) throw IntervalError("two_point requires a < b");
  return DiscreteMeasure::from_atoms({{a, 0.5}, {b, 0.5}}, b - a);
}

/// (delta_a + C* delta_{a+h} + delta_{a+2h}) / (2 + C*).
inline DiscreteMeasure three_point(double a, double h, double c_star) {
  if (!(c_star > 0.0)) {
    throw AssumptionError("three-point measure requires C* > 0, got " + std::to_string(c_star));
  }
  if (!(h > 0.0)) throw IntervalError("three-point measure requires h > 0");
  const double norm = 2.0 + c_star;
  return DiscreteMeasure::from_atoms(
      {{a, 1.0 / norm}, {a + h, c_star / norm}, {a + 2.0 * h, 1.0 / norm}}, 2.0 * h);
}

/// C* = 1 + (Gamma(h) - Gamma(2h)) / (Gamma(h) - Gamma(0)).
inline double c_star(const Kernel& kernel, double h) {
  const double g0 = gamma(kernel, 0.0);
  const double g1 = gamma(kernel, h);
  const double g2 = gamma(kernel, 2.0 * h);
  const double denom = g1 - g0;
  if (std::abs(denom) <= 1e-14 * std::max(1.0, std::abs(g0))) {
    throw DegenerateKernelError("Gamma(h) equals Gamma(0); C* is undefined");
  }
  return 1.0 + (g1 - g2) / denom;
}

/// lambda * mu + (1 - lambda) * nu.
inline DiscreteMeasure convex_combination(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                          double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("lambda must lie in [0, 1]");
  std::vector<Atom> atoms;
  atoms.reserve(mu.size() + nu.size());
  for (const auto& at : mu.atoms()) atoms.push_back({at.location, lambda * at.weight});
  for (const auto& at : nu.atoms()) atoms.push_back({at.location, (1.0 - lambda) * at.weight});
  const double lo = std::min(mu.lower(), nu.lower());
  const double hi = std::max(mu.upper(), nu.upper());
  return DiscreteMeasure::from_atoms(std::move(atoms), std::max(1.0, hi - lo));
}

// ---------------------------------------------------------------------------
// CSV: header `location,weight`, 17 significant digits.

inline std::string to_csv(const DiscreteMeasure& mu) {
  std::string out = "location,weight\n";
  char buf[64];
  for (const auto& at : mu.atoms()) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", at.location, at.weight);
    out += buf;
  }
  return out;
}

namespace detail {

inline std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline double parse_double(const std::string& field, std::size_t line) {
  const std::string f = trim(field);
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(f, &pos);
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line) + ": not a number: '" + f + "'");
  }
  if (pos != f.size()) {
    throw ParseError("line " + std::to_string(line) + ": trailing characters in '" + f + "'");
  }
  return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, ',')) fields.push_back(cur);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace detail

inline DiscreteMeasure measure_from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || detail::trim(line) != "location,weight") {
    throw ParseError("measure CSV must start with header 'location,weight'");
  }
  std::vector<Atom> atoms;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 2) {
      throw ParseError("line " + std::to_string(lineno) + ": expected 2 fields");
    }
    atoms.push_back({detail::parse_double(fields[0], lineno),
                     detail::parse_double(fields[1], lineno)});
  }
  if (atoms.empty()) throw ParseError("measure CSV has no atoms");
  try {
    return DiscreteMeasure::from_atoms(std::move(atoms));
  } catch (const EmptyMeasureError& e) {
    throw ParseError(e.what());
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
}

}  // namespace gaussmin
