#pragma once

// The gaussmin subcommands. Each returns a process exit code:
//   0 ok, 2 verification or convergence failure, 3 no applicable closed form,
//   4 malformed input, 5 numerical failure.
// Outputs go to the configured directory; reruns with the same config are byte-identical.

#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gaussmin/audit.hpp"
#include "gaussmin/config.hpp"
#include "gaussmin/energy.hpp"
#include "gaussmin/figures.hpp"
#include "gaussmin/format.hpp"
#include "gaussmin/kernel.hpp"
#include "gaussmin/measure.hpp"
#include "gaussmin/montecarlo.hpp"
#include "gaussmin/solver.hpp"
#include "gaussmin/svg.hpp"

namespace gaussmin {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailed = 2,
  kExitNoClosedForm = 3,
  kExitMalformed = 4,
  kExitNumerical = 5,
};

struct ClosedForm {
  std::optional<DiscreteMeasure> measure;
  std::string regime;
  std::string reason;
};

namespace detail {

inline double audit_range(const RunConfig& cfg, double h) {
  return cfg.audit_range > 0.0 ? cfg.audit_range : 5.0 * h;
}

inline std::string report_block(const AssumptionReport& r) {
  KeyValueBlock kv;
  kv.add("assumption", to_string(r.name));
  kv.add("passed", r.passed);
  kv.add("strict", r.strict);
  kv.add("worst_violation", r.worst_violation);
  std::string w;
  for (std::size_t i = 0; i < r.witness.size(); ++i) {
    w += (i ? " " : "") + format_double(r.witness[i]);
  }
  kv.add("witness", w);
  kv.add("samples", r.samples);
  if (r.sign_changes) kv.add("sign_changes", *r.sign_changes);
  if (r.c_star) kv.add("c_star", *r.c_star);
  if (!r.note.empty()) kv.add("note", r.note);
  return kv.str();
}

inline std::string margins_csv(const AssumptionReport& r) {
  CsvTable t(r.margin_columns);
  for (const auto& row : r.margins) t.row(row);
  return t.str();
}

inline std::string profile_csv(const PotentialProfile& p) {
  CsvTable t({"t", "phi"});
  for (std::size_t i = 0; i < p.grid.size(); ++i) t.row({p.grid.node(i), p.values[i]});
  return t.str();
}

inline KeyValueBlock optimality_block(const OptimalityReport& r) {
  KeyValueBlock kv;
  kv.add("energy", r.energy)
      .add("min_potential", r.min_potential)
      .add("argmin", r.argmin)
      .add("support_deviation", r.support_deviation)
      .add("global_slack", r.global_slack)
      .add("tolerance", r.tolerance)
      .add("passed", r.passed);
  return kv;
}

}  // namespace detail

/// Selects the applicable closed-form optimal measure for `kernel` on [a, b]:
///   base process with nonnegatively correlated increments -> delta_a
///   increment kernel, b - a <= h                           -> (delta_a + delta_b) / 2
///   increment kernel, b - a = 2h, second-case audit passes -> three-point measure
inline ClosedForm select_closed_form(const Kernel& kernel, const RunConfig& cfg) {
  const double a = cfg.a;
  const double b = cfg.b;
  ClosedForm cf;
  if (kernel.is<BrownianMotion>() || kernel.is<FractionalBM>()) {
    const auto rep = audit_nonneg_increments(kernel, 0.0, b, cfg.audit_samples, cfg.audit_seed);
    if (!rep.passed) {
      cf.reason = "increments are not nonnegatively correlated (worst covariance " +
                  format_double(rep.worst_violation) + ")";
      return cf;
    }
    cf.measure = dirac(a);
    cf.regime = "dirac";
    return cf;
  }
  if (const auto h = kernel.lag()) {
    const double len = b - a;
    if (len <= *h * (1.0 + 1e-12)) {
      cf.measure = two_point(a, b);
      cf.regime = "two_point";
      return cf;
    }
    if (std::abs(len - 2.0 * *h) <= 1e-12 * *h) {
      const auto rep = audit_second_case(kernel, cfg.audit_n);
      if (!rep.passed) {
        cf.reason = "second-case assumption fails (C* = " + format_double(*rep.c_star) +
                    ", sign changes = " + std::to_string(*rep.sign_changes) + ")";
        return cf;
      }
      cf.measure = three_point(a, *h, *rep.c_star);
      cf.regime = "three_point";
      return cf;
    }
    cf.reason = "interval length " + format_double(len) + " is neither <= h nor = 2h (h = " +
                format_double(*h) + ")";
    return cf;
  }
  cf.reason = "no closed form is known for tabulated kernels";
  return cf;
}

inline int cmd_rate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Kernel kernel = make_kernel(cfg);
  const auto cf = select_closed_form(kernel, cfg);
  if (!cf.measure) {
    err << "no closed-form optimal measure applies: " << cf.reason
        << "; use `gaussmin solve` for a numerical answer\n";
    return kExitNoClosedForm;
  }
  const Grid grid(cfg.a, cfg.b, cfg.n);
  const auto rep = check_optimality(kernel, *cf.measure, grid, cfg.verify_tol);

  KeyValueBlock kv;
  kv.add("kernel", kernel.describe())
      .add("a", cfg.a)
      .add("b", cfg.b)
      .add("regime", cf.regime)
      .add("sigma_sq", rep.energy)
      .add("rate", rate(rep.energy))
      .add("verified", rep.passed)
      .add("support_deviation", rep.support_deviation)
      .add("global_slack", rep.global_slack)
      .add("tolerance", rep.tolerance);
  std::string atoms;
  for (const auto& at : cf.measure->atoms()) {
    atoms += (atoms.empty() ? "" : " ") + format_double(at.weight) + "@" + format_double(at.location);
  }
  kv.add("measure", atoms);

  write_file_atomic(cfg.out_dir / "rate_summary.txt", kv.str());
  write_file_atomic(cfg.out_dir / "rate_measure.csv", to_csv(*cf.measure));
  write_file_atomic(cfg.out_dir / "rate_potential.csv", detail::profile_csv(rep.profile));
  out << kv.str();
  if (!rep.passed) {
    err << "closed-form measure failed the equilibrium check\n";
    return kExitFailed;
  }
  return kExitOk;
}

inline int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Kernel kernel = make_kernel(cfg);
  const Grid grid(cfg.a, cfg.b, cfg.n);
  const auto problem = discretize(kernel, grid);
  const auto res = solve(problem, cfg.solver_tol, cfg.max_iter);

  CsvTable weights({"node", "weight"});
  for (std::size_t i = 0; i < grid.size(); ++i) weights.row({grid.node(i), res.weights[i]});

  KeyValueBlock kv;
  kv.add("kernel", kernel.describe())
      .add("a", cfg.a)
      .add("b", cfg.b)
      .add("n", cfg.n)
      .add("energy", res.energy)
      .add("rate", rate(res.energy))
      .add("gap", res.equilibrium_gap)
      .add("iterations", res.iterations)
      .add("tol", cfg.solver_tol)
      .add("converged", res.converged);

  write_file_atomic(cfg.out_dir / "solve_weights.csv", weights.str());
  try {
    const auto mu = extract_measure(res, grid, cfg.prune);
    write_file_atomic(cfg.out_dir / "solve_measure.csv", to_csv(mu));
    kv.add("atoms", mu.size());
  } catch (const EmptyMeasureError&) {
    kv.add("atoms", std::size_t{0});
  }
  write_file_atomic(cfg.out_dir / "solve_summary.txt", kv.str());
  out << kv.str();
  if (!res.converged) {
    err << "solver did not converge: gap " << format_double(res.equilibrium_gap) << " > tol "
        << format_double(cfg.solver_tol) << " after " << res.iterations << " iterations\n";
    return kExitFailed;
  }
  return kExitOk;
}

inline int cmd_verify(const RunConfig& cfg, const std::filesystem::path& measure_path,
                      std::ostream& out, std::ostream& err) {
  DiscreteMeasure mu = [&] {
    try {
      return measure_from_csv(read_file(measure_path));
    } catch (const ParseError& e) {
      throw ParseError(measure_path.string() + ": " + e.what());
    }
  }();
  const Kernel kernel = make_kernel(cfg);
  const Grid grid(cfg.a, cfg.b, cfg.n);
  const auto rep = check_optimality(kernel, mu, grid, cfg.verify_tol);
  auto kv = detail::optimality_block(rep);
  kv.add("rate", rep.energy > 0.0 ? format_double(rate(rep.energy)) : std::string("nan"));
  write_file_atomic(cfg.out_dir / "verify_report.txt", kv.str());
  write_file_atomic(cfg.out_dir / "verify_potential.csv", detail::profile_csv(rep.profile));
  out << kv.str();
  if (!rep.passed) {
    err << "measure is not optimal: support deviation " << format_double(rep.support_deviation)
        << ", global slack " << format_double(rep.global_slack) << "\n";
    return kExitFailed;
  }
  return kExitOk;
}

inline std::vector<AssumptionReport> run_audits(const Kernel& kernel, const RunConfig& cfg) {
  std::vector<AssumptionReport> reports;
  if (const auto h = kernel.lag()) {
    const Kernel base = *kernel.base();
    reports.push_back(audit_nonneg_increments(base, 0.0, std::max(cfg.b, 0.0) + *h,
                                              cfg.audit_samples, cfg.audit_seed));
    const double range = detail::audit_range(cfg, *h);
    reports.push_back(audit_increment_monotone(kernel, range, cfg.audit_n));
    reports.push_back(audit_first_case(kernel, cfg.b_samples, range, cfg.audit_n));
    reports.push_back(audit_second_case(kernel, cfg.audit_n));
    return reports;
  }
  const double lo = kernel.is<Tabulated>() ? cfg.a : 0.0;
  reports.push_back(audit_nonneg_increments(kernel, lo, cfg.b, cfg.audit_samples, cfg.audit_seed));
  try {
    reports.push_back(audit_converse(kernel, cfg.audit_samples, cfg.audit_seed, cfg.b));
  } catch (const PinnedOriginError&) {
  } catch (const GridError&) {
  }
  return reports;
}

inline int cmd_assumptions(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const Kernel kernel = make_kernel(cfg);
  const auto reports = run_audits(kernel, cfg);
  std::string text = "kernel = " + kernel.describe() + "\n";
  bool all = true;
  for (const auto& r : reports) {
    text += "\n[" + to_string(r.name) + "]\n" + detail::report_block(r);
    all = all && r.passed;
    write_file_atomic(cfg.out_dir / ("assumption_" + to_string(r.name) + ".csv"),
                      detail::margins_csv(r));
  }
  text += "\nall_passed = " + std::string(all ? "true" : "false") + "\n";
  write_file_atomic(cfg.out_dir / "assumptions.txt", text);
  out << text;
  if (!all) {
    err << "one or more assumptions failed";
    for (const auto& r : reports) {
      if (!r.passed && !r.note.empty()) {
        err << " (" << to_string(r.name) << " is degenerate, see note)";
      }
    }
    err << "\n";
    return kExitFailed;
  }
  return kExitOk;
}

/// sigma*^2 for simulation: configured value, else verified closed form, else solver.
inline double simulation_sigma_sq(const Kernel& kernel, const RunConfig& cfg, std::string& source) {
  if (cfg.sigma_sq) {
    source = "config";
    return *cfg.sigma_sq;
  }
  const auto cf = select_closed_form(kernel, cfg);
  if (cf.measure) {
    const auto rep = check_optimality(kernel, *cf.measure, Grid(cfg.a, cfg.b, cfg.n), cfg.verify_tol);
    if (rep.passed) {
      source = cf.regime;
      return rep.energy;
    }
  }
  source = "solver";
  return solve(discretize(kernel, Grid(cfg.a, cfg.b, cfg.n)), cfg.solver_tol, cfg.max_iter).energy;
}

inline std::string ldp_csv(const LdpEstimate& est) {
  CsvTable t({"u", "trials", "hits", "p_hat", "log_p_over_u2", "ci_halfwidth", "flag"});
  for (std::size_t k = 0; k < est.thresholds.size(); ++k) {
    t.row({format_double(est.thresholds[k]), std::to_string(est.trials),
           std::to_string(est.hits[k]),
           format_double(static_cast<double>(est.hits[k]) / static_cast<double>(est.trials)),
           format_double(est.normalized[k]), format_double(est.ci_halfwidth[k]),
           est.lower_bound[k] ? "lower_bound" : "ok"});
  }
  return t.str();
}

inline int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& /*err*/) {
  const Kernel kernel = make_kernel(cfg);
  std::string source;
  const double sigma_sq = simulation_sigma_sq(kernel, cfg, source);
  const auto est = ldp_curve(kernel, cfg.a, cfg.b, cfg.mc_n, cfg.u_list, cfg.trials,
                             cfg.mc_seed, sigma_sq, cfg.jitter);
  KeyValueBlock kv;
  kv.add("kernel", kernel.describe())
      .add("a", cfg.a)
      .add("b", cfg.b)
      .add("n", cfg.mc_n)
      .add("trials", cfg.trials)
      .add("seed", static_cast<std::size_t>(cfg.mc_seed))
      .add("jitter", est.jitter)
      .add("sigma_sq", sigma_sq)
      .add("sigma_sq_source", source)
      .add("theoretical_rate", est.theoretical_rate)
      .add("trend_increasing", est.trend_increasing());
  write_file_atomic(cfg.out_dir / "ldp.csv", ldp_csv(est));
  write_file_atomic(cfg.out_dir / "ldp_summary.txt", kv.str());
  out << kv.str() << "\n" << ldp_csv(est);
  return kExitOk;
}

inline int cmd_figures(const RunConfig& cfg, std::ostream& out, std::ostream& /*err*/) {
  const Kernel kernel = make_kernel(cfg);
  FigureOptions opt;
  opt.n = cfg.figure_n;
  opt.gamma_nodes = cfg.figure_gamma_nodes;
  opt.half_range = cfg.figure_range;
  const auto curves = figure_curves(kernel, opt);
  for (const auto& c : curves) {
    CsvTable t({c.x_label, c.y_label});
    for (std::size_t i = 0; i < c.xs.size(); ++i) t.row({c.xs[i], c.ys[i]});
    write_file_atomic(cfg.out_dir / (c.name + ".csv"), t.str());
    if (cfg.write_svg) {
      write_file_atomic(cfg.out_dir / (c.name + ".svg"), svg_polyline(c.title, c.xs, c.ys));
    }
    out << c.name << ": " << c.xs.size() << " points\n";
  }
  out << "gamma_prime_sign_changes = " << value_sign_changes(curves[5].ys) << "\n";
  return kExitOk;
}

/// Runs a subcommand with error-to-exit-code mapping.
template <class F>
int run_guarded(F&& command, std::ostream& err) {
  try {
    return command();
  } catch (const ParseError& e) {
    err << "malformed input: " << e.what() << "\n";
    return kExitMalformed;
  } catch (const ConfigError& e) {
    err << "invalid config: " << e.what() << "\n";
    return kExitMalformed;
  } catch (const FactorizationError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace gaussmin
