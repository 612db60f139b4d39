// gaussmin <rate|solve|verify|assumptions|simulate|figures> --config <path> [--out <dir>]

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gaussmin/commands.hpp"
#include "gaussmin/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Minimum-energy measures and large-deviation rates for high Gaussian minima"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string measure_path;

  const auto add = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "run configuration (INI)")->required();
    sub->add_option("--out", out_dir, "output directory (overrides [output] dir)");
    return sub;
  };
  auto* rate = add("rate", "closed-form sigma*^2 and rate, verified by the equilibrium check");
  auto* solve = add("solve", "solve the discretized minimum-energy problem");
  auto* verify = add("verify", "check optimality of a measure given as CSV");
  verify->add_option("--measure", measure_path, "measure CSV (location,weight)")->required();
  auto* assumptions = add("assumptions", "audit the hypotheses of the closed forms");
  auto* simulate = add("simulate", "Monte Carlo estimate of log P(min > u) / u^2");
  auto* figures = add("figures", "write f, f', f'', Gamma, gamma, gamma' curves");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : gaussmin::kExitMalformed;
  }

  return gaussmin::run_guarded(
      [&]() -> int {
        auto cfg = gaussmin::load_config(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        auto& out = std::cout;
        auto& err = std::cerr;
        if (*rate) return gaussmin::cmd_rate(cfg, out, err);
        if (*solve) return gaussmin::cmd_solve(cfg, out, err);
        if (*verify) return gaussmin::cmd_verify(cfg, measure_path, out, err);
        if (*assumptions) return gaussmin::cmd_assumptions(cfg, out, err);
        if (*simulate) return gaussmin::cmd_simulate(cfg, out, err);
        if (*figures) return gaussmin::cmd_figures(cfg, out, err);
        return gaussmin::kExitMalformed;
      },
      std::cerr);
}
