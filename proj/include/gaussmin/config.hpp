#pragma once

// Run configuration: INI-style sections, flat `key = value` pairs. Unknown sections and keys
// are rejected. Example:
//
//   [kernel]
//   kind = fgn        ; bm | fbm | fgn | increment | tabulated
//   H = 0.75
//   h = 1
//   [interval]
//   a = 0
//   b = 2

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "gaussmin/audit.hpp"
#include "gaussmin/energy.hpp"
#include "gaussmin/errors.hpp"
#include "gaussmin/format.hpp"
#include "gaussmin/grid.hpp"
#include "gaussmin/kernel.hpp"
#include "gaussmin/measure.hpp"
#include "gaussmin/montecarlo.hpp"
#include "gaussmin/solver.hpp"

namespace gaussmin {

struct KernelSpec {
  std::string kind = "fgn";
  double hurst = 0.75;
  double lag = 1.0;
  std::string base = "fbm";
  std::filesystem::path file;
};

struct RunConfig {
  KernelSpec kernel;
  double a = 0.0;
  double b = 1.0;
  std::size_t n = kDefaultGridSize;

  double solver_tol = kDefaultSolverTol;
  std::size_t max_iter = kDefaultMaxIter;
  double prune = kDefaultPrune;

  double verify_tol = kClosedFormTolerance;

  std::size_t audit_samples = 10000;
  std::uint64_t audit_seed = 1;
  std::size_t b_samples = kDefaultBSamples;
  std::size_t audit_n = 1001;
  /// <= 0 means 5h.
  double audit_range = 0.0;

  std::vector<double> u_list = {1.0, 1.5, 2.0};
  std::size_t trials = 100000;
  std::uint64_t mc_seed = 1;
  std::size_t mc_n = kDefaultMcGridSize;
  std::optional<double> sigma_sq;
  double jitter = kDefaultJitter;

  std::size_t figure_n = 601;
  std::size_t figure_gamma_nodes = 1001;
  double figure_range = 0.0;

  std::filesystem::path out_dir = "gaussmin_out";
  bool write_svg = false;
};

namespace detail {

inline const std::map<std::string, std::set<std::string>>& config_schema() {
  static const std::map<std::string, std::set<std::string>> schema = {
      {"kernel", {"kind", "H", "h", "base", "file"}},
      {"interval", {"a", "b"}},
      {"grid", {"n"}},
      {"solver", {"tol", "max_iter", "prune"}},
      {"verify", {"tol"}},
      {"audit", {"samples", "seed", "b_samples", "n", "range"}},
      {"mc", {"u", "trials", "seed", "n", "sigma_sq", "jitter"}},
      {"figures", {"n", "gamma_nodes", "range"}},
      {"output", {"dir", "format"}},
  };
  return schema;
}

inline double config_double(const std::string& key, const std::string& text) {
  try {
    return parse_double(text, 0);
  } catch (const ParseError&) {
    throw ConfigError("'" + key + "' is not a number: '" + text + "'");
  }
}

inline std::uint64_t config_uint(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    if (!t.empty() && t.front() == '-') throw std::invalid_argument("negative");
    v = std::stoull(t, &pos);
  } catch (const std::exception&) {
    throw ConfigError("'" + key + "' is not a nonnegative integer: '" + text + "'");
  }
  if (pos != t.size()) throw ConfigError("'" + key + "' is not an integer: '" + text + "'");
  return v;
}

inline void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace detail

/// Parses config text; relative file paths resolve against `base_dir`.
inline RunConfig parse_config(const std::string& text,
                              const std::filesystem::path& base_dir = ".") {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }

  RunConfig cfg;
  const auto& schema = detail::config_schema();
  for (const auto& [section, body] : tree) {
    const auto it = schema.find(section);
    if (it == schema.end()) {
      throw ConfigError(body.empty() ? "key '" + section + "' outside of any section"
                                     : "unknown config section [" + section + "]");
    }
    for (const auto& [key, node] : body) {
      if (!it->second.contains(key)) {
        throw ConfigError("unknown key '" + key + "' in section [" + section + "]");
      }
      const std::string value = detail::trim(node.get_value<std::string>());
      const std::string where = section + "." + key;
      using detail::config_double;
      using detail::config_uint;
      if (section == "kernel") {
        if (key == "kind") cfg.kernel.kind = value;
        if (key == "H") cfg.kernel.hurst = config_double(where, value);
        if (key == "h") cfg.kernel.lag = config_double(where, value);
        if (key == "base") cfg.kernel.base = value;
        if (key == "file") cfg.kernel.file = base_dir / value;
      } else if (section == "interval") {
        (key == "a" ? cfg.a : cfg.b) = config_double(where, value);
      } else if (section == "grid") {
        cfg.n = config_uint(where, value);
      } else if (section == "solver") {
        if (key == "tol") cfg.solver_tol = config_double(where, value);
        if (key == "max_iter") cfg.max_iter = config_uint(where, value);
        if (key == "prune") cfg.prune = config_double(where, value);
      } else if (section == "verify") {
        cfg.verify_tol = config_double(where, value);
      } else if (section == "audit") {
        if (key == "samples") cfg.audit_samples = config_uint(where, value);
        if (key == "seed") cfg.audit_seed = config_uint(where, value);
        if (key == "b_samples") cfg.b_samples = config_uint(where, value);
        if (key == "n") cfg.audit_n = config_uint(where, value);
        if (key == "range") cfg.audit_range = config_double(where, value);
      } else if (section == "mc") {
        if (key == "u") {
          cfg.u_list.clear();
          std::istringstream us(value);
          std::string item;
          while (std::getline(us, item, ',')) cfg.u_list.push_back(config_double(where, item));
        }
        if (key == "trials") cfg.trials = config_uint(where, value);
        if (key == "seed") cfg.mc_seed = config_uint(where, value);
        if (key == "n") cfg.mc_n = config_uint(where, value);
        if (key == "sigma_sq") cfg.sigma_sq = config_double(where, value);
        if (key == "jitter") cfg.jitter = config_double(where, value);
      } else if (section == "figures") {
        if (key == "n") cfg.figure_n = config_uint(where, value);
        if (key == "gamma_nodes") cfg.figure_gamma_nodes = config_uint(where, value);
        if (key == "range") cfg.figure_range = config_double(where, value);
      } else if (section == "output") {
        if (key == "dir") cfg.out_dir = base_dir / value;
        if (key == "format") {
          std::istringstream fs(value);
          std::string item;
          while (std::getline(fs, item, ',')) {
            item = detail::trim(item);
            detail::require(item == "csv" || item == "svg", "output.format must be csv and/or svg");
            if (item == "svg") cfg.write_svg = true;
          }
        }
      }
    }
  }

  using detail::require;
  static const std::set<std::string> kinds = {"bm", "fbm", "fgn", "increment", "tabulated"};
  require(kinds.contains(cfg.kernel.kind), "kernel.kind must be one of bm, fbm, fgn, increment, tabulated");
  require(cfg.kernel.hurst > 0.0 && cfg.kernel.hurst < 1.0, "kernel.H must lie in (0, 1)");
  require(cfg.kernel.lag > 0.0, "kernel.h must be positive");
  require(cfg.kernel.base == "bm" || cfg.kernel.base == "fbm", "kernel.base must be bm or fbm");
  if (cfg.kernel.kind == "tabulated") {
    require(!cfg.kernel.file.empty(), "tabulated kernels need kernel.file");
    require(std::filesystem::exists(cfg.kernel.file),
            "kernel.file does not exist: " + cfg.kernel.file.string());
  }
  require(std::isfinite(cfg.a) && std::isfinite(cfg.b) && cfg.a < cfg.b, "interval requires a < b");
  require(cfg.n >= 2, "grid.n must be at least 2");
  require(cfg.solver_tol > 0.0, "solver.tol must be positive");
  require(cfg.max_iter >= 1, "solver.max_iter must be at least 1");
  require(cfg.prune >= 0.0 && cfg.prune <= 0.01, "solver.prune must lie in [0, 0.01]");
  require(cfg.verify_tol > 0.0, "verify.tol must be positive");
  require(cfg.audit_samples >= 1, "audit.samples must be at least 1");
  require(cfg.b_samples >= 1, "audit.b_samples must be at least 1");
  require(cfg.audit_n >= 11, "audit.n must be at least 11");
  require(!cfg.u_list.empty(), "mc.u must list at least one threshold");
  for (std::size_t k = 0; k < cfg.u_list.size(); ++k) {
    require(cfg.u_list[k] > 0.0, "mc.u thresholds must be positive");
    require(k == 0 || cfg.u_list[k] > cfg.u_list[k - 1], "mc.u must be strictly increasing");
  }
  require(cfg.trials >= 1, "mc.trials must be at least 1");
  require(cfg.mc_n >= 2, "mc.n must be at least 2");
  require(!cfg.sigma_sq || *cfg.sigma_sq > 0.0, "mc.sigma_sq must be positive");
  require(cfg.jitter >= 0.0 && cfg.jitter <= kMaxJitter, "mc.jitter must lie in [0, 1e-6]");
  require(cfg.figure_n >= 3 && cfg.figure_gamma_nodes >= 11, "figure grids are too small");
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
  return parse_config(read_file(path), path.parent_path().empty() ? "." : path.parent_path());
}

/// Tabulated covariance from CSV triples `i,j,value` (header row required). Missing
/// entries are filled from their transpose.
inline Kernel load_tabulated(const std::filesystem::path& path, double a, double b) {
  const std::string text = read_file(path);
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw ParseError("tabulated CSV is empty");
  struct Entry {
    std::size_t i, j;
    double v;
  };
  std::vector<Entry> entries;
  std::size_t dim = 0;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 3) throw ParseError("line " + std::to_string(lineno) + ": expected i,j,value");
    const double fi = detail::parse_double(f[0], lineno);
    const double fj = detail::parse_double(f[1], lineno);
    if (fi < 0 || fj < 0 || fi != std::floor(fi) || fj != std::floor(fj)) {
      throw ParseError("line " + std::to_string(lineno) + ": indices must be nonnegative integers");
    }
    entries.push_back({static_cast<std::size_t>(fi), static_cast<std::size_t>(fj),
                       detail::parse_double(f[2], lineno)});
    dim = std::max({dim, entries.back().i + 1, entries.back().j + 1});
  }
  if (dim < 2) throw ParseError("tabulated kernel needs at least 2 grid nodes");
  const auto nd = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(nd, nd, std::numeric_limits<double>::quiet_NaN());
  for (const auto& e : entries) m(static_cast<Eigen::Index>(e.i), static_cast<Eigen::Index>(e.j)) = e.v;
  for (Eigen::Index i = 0; i < nd; ++i) {
    for (Eigen::Index j = 0; j < nd; ++j) {
      if (std::isnan(m(i, j))) m(i, j) = m(j, i);
      if (std::isnan(m(i, j))) {
        throw ParseError("tabulated CSV lacks entry (" + std::to_string(i) + ", " +
                         std::to_string(j) + ")");
      }
    }
  }
  return Kernel::tabulated(Grid(a, b, dim), std::move(m));
}

inline Kernel make_kernel(const RunConfig& cfg) {
  const auto& k = cfg.kernel;
  if (k.kind == "bm") return Kernel::brownian_motion();
  if (k.kind == "fbm") return Kernel::fbm(k.hurst);
  if (k.kind == "fgn") return Kernel::fgn(k.hurst, k.lag);
  if (k.kind == "increment") {
    const Kernel base = k.base == "bm" ? Kernel::brownian_motion() : Kernel::fbm(k.hurst);
    return Kernel::increment_of(base, k.lag);
  }
  return load_tabulated(k.file, cfg.a, cfg.b);
}

}  // namespace gaussmin
