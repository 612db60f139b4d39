#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "gaussmin/commands.hpp"
#include "gaussmin/config.hpp"
#include "gaussmin/figures.hpp"

using namespace gaussmin;
namespace fs = std::filesystem;

namespace {

class Workspace : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / "gaussmin_tests" /
           (std::string(info->test_suite_name()) + "_" + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }

  RunConfig config(const std::string& text) {
    auto cfg = parse_config(text, dir_);
    cfg.out_dir = dir_ / "out";
    return cfg;
  }

  fs::path write(const std::string& name, const std::string& text) {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  std::string read(const std::string& name) { return read_file(dir_ / "out" / name); }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

std::string fgn(double hurst, double a, double b, const std::string& extra = "") {
  std::ostringstream s;
  s << "[kernel]\nkind = fgn\nH = " << hurst << "\nh = 1\n[interval]\na = " << a << "\nb = " << b
    << "\n" << extra;
  return s.str();
}

double summary_value(const std::string& text, const std::string& key) {
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind(key + " = ", 0) == 0) return std::stod(line.substr(key.size() + 3));
  }
  return std::nan("");
}

}  // namespace

using Config = Workspace;

TEST_F(Config, Defaults) {
  const auto cfg = parse_config("");
  EXPECT_EQ(cfg.kernel.kind, "fgn");
  EXPECT_EQ(cfg.n, 401u);
  EXPECT_EQ(cfg.solver_tol, 1e-9);
  EXPECT_EQ(cfg.u_list, (std::vector<double>{1.0, 1.5, 2.0}));
}

TEST_F(Config, ParsesAllSections) {
  const auto cfg = parse_config(
      "[kernel]\nkind = increment\nbase = bm\nh = 0.5\n[grid]\nn = 51\n[solver]\ntol = 1e-8\n"
      "max_iter = 10\n[mc]\nu = 1, 2,3\ntrials = 5\nsigma_sq = 0.5\n[output]\ndir = x\n"
      "format = csv, svg\n",
      "/base");
  EXPECT_EQ(cfg.kernel.kind, "increment");
  EXPECT_EQ(cfg.kernel.lag, 0.5);
  EXPECT_EQ(cfg.n, 51u);
  EXPECT_EQ(cfg.max_iter, 10u);
  EXPECT_EQ(cfg.u_list, (std::vector<double>{1.0, 2.0, 3.0}));
  EXPECT_EQ(cfg.sigma_sq, 0.5);
  EXPECT_EQ(cfg.out_dir, fs::path("/base/x"));
  EXPECT_TRUE(cfg.write_svg);
  EXPECT_TRUE(make_kernel(cfg).is<IncrementOf>());
}

TEST_F(Config, RejectsInvalid) {
  EXPECT_THROW(parse_config("[kernel]\ncolour = red\n"), ConfigError);
  EXPECT_THROW(parse_config("[extras]\nx = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[kernel]\nH = 1.2\n"), ConfigError);
  EXPECT_THROW(parse_config("[kernel]\nH = abc\n"), ConfigError);
  EXPECT_THROW(parse_config("[interval]\na = 2\nb = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[grid]\nn = -3\n"), ConfigError);
  EXPECT_THROW(parse_config("[mc]\nu = 2, 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[kernel]\nkind = tabulated\nfile = missing.csv\n"), ConfigError);
  EXPECT_THROW(parse_config("[output]\nformat = png\n"), ConfigError);
  EXPECT_THROW(load_config(dir_ / "nope.ini"), ConfigError);
}

TEST_F(Config, TabulatedKernelFromCsv) {
  write("k.csv", "i,j,value\n0,0,1\n0,1,0.5\n1,1,1\n1,2,0.5\n2,2,1\n0,2,0.25\n");
  const auto cfg = config("[kernel]\nkind = tabulated\nfile = k.csv\n[interval]\na = 0\nb = 2\n");
  const auto k = make_kernel(cfg);
  EXPECT_TRUE(k.is<Tabulated>());
  EXPECT_EQ(eval_covariance(k, 2.0, 1.0), 0.5);
  EXPECT_TRUE(k.stationary());
  write("bad.csv", "i,j,value\n0,0,1\n1,1,1\n");
  EXPECT_THROW(load_tabulated(dir_ / "bad.csv", 0.0, 1.0), ParseError);
}

using Commands = Workspace;

TEST_F(Commands, RateFbm) {
  const auto cfg = config("[kernel]\nkind = fbm\nH = 0.75\n[interval]\na = 1\nb = 2\n");
  EXPECT_EQ(cmd_rate(cfg, out_, err_), kExitOk);
  const auto text = read("rate_summary.txt");
  EXPECT_EQ(summary_value(text, "sigma_sq"), 1.0);
  EXPECT_EQ(summary_value(text, "rate"), -0.5);
  EXPECT_EQ(read("rate_measure.csv"), "location,weight\n1,1\n");
}

TEST_F(Commands, RateTwoPoint) {
  EXPECT_EQ(cmd_rate(config(fgn(0.75, 0, 1)), out_, err_), kExitOk);
  EXPECT_NEAR(summary_value(read("rate_summary.txt"), "sigma_sq"), 0.7071067811865475, 1e-12);
}

TEST_F(Commands, RateThreePoint) {
  EXPECT_EQ(cmd_rate(config(fgn(0.75, 0, 2)), out_, err_), kExitOk);
  EXPECT_NEAR(summary_value(read("rate_summary.txt"), "sigma_sq"), 0.5744706733790145, 1e-12);
}

TEST_F(Commands, RateWithoutClosedForm) {
  EXPECT_EQ(cmd_rate(config(fgn(0.75, 0, 1.5)), out_, err_), kExitNoClosedForm);
  EXPECT_NE(err_.str().find("solve"), std::string::npos);
  EXPECT_EQ(cmd_rate(config("[kernel]\nkind = fbm\nH = 0.3\n[interval]\na = 1\nb = 2\n"), out_, err_),
            kExitNoClosedForm);
}

TEST_F(Commands, SolveExamples) {
  EXPECT_EQ(cmd_solve(config(fgn(0.5, 0, 2, "[grid]\nn = 201\n")), out_, err_), kExitOk);
  EXPECT_NEAR(summary_value(read("solve_summary.txt"), "energy"), 1.0 / 3.0, 1e-5);
  EXPECT_EQ(cmd_solve(config("[kernel]\nkind = fbm\nH = 0.75\n[interval]\na = 1\nb = 2\n[grid]\nn = 201\n"),
                      out_, err_),
            kExitOk);
  EXPECT_NEAR(summary_value(read("solve_summary.txt"), "energy"), 1.0, 1e-5);
  EXPECT_EQ(cmd_solve(config(fgn(0.75, 0, 2, "[solver]\nmax_iter = 1\n")), out_, err_), kExitFailed);
  EXPECT_NE(err_.str().find("gap"), std::string::npos);
}

TEST_F(Commands, RateAndSolveAgree) {
  const std::string cases[] = {fgn(0.75, 0, 2), fgn(0.6, 0, 0.5), fgn(0.9, 0, 1),
                               "[kernel]\nkind = fbm\nH = 0.9\n[interval]\na = 2\nb = 3\n",
                               "[kernel]\nkind = bm\n[interval]\na = 0.5\nb = 1.5\n"};
  for (const auto& text : cases) {
    const auto cfg = config(text);
    ASSERT_EQ(cmd_rate(cfg, out_, err_), kExitOk) << text;
    ASSERT_EQ(cmd_solve(cfg, out_, err_), kExitOk) << text;
    EXPECT_NEAR(summary_value(read("rate_summary.txt"), "sigma_sq"),
                summary_value(read("solve_summary.txt"), "energy"), 1e-5);
  }
}

TEST_F(Commands, VerifyExamples) {
  const auto cfg = config(fgn(0.75, 0, 1));
  EXPECT_EQ(cmd_verify(cfg, write("two.csv", "location,weight\n0,0.5\n1,0.5\n"), out_, err_), kExitOk);
  EXPECT_EQ(cmd_verify(cfg, write("dirac.csv", "location,weight\n0,1\n"), out_, err_), kExitFailed);
  EXPECT_EQ(cmd_verify(config(fgn(0.5, 0, 2)),
                       write("three.csv", "location,weight\n0,0.3333333333333333\n1,0.3333333333333333\n"
                                          "2,0.33333333333333337\n"),
                       out_, err_),
            kExitOk);
  const auto prof = read("verify_potential.csv");
  std::istringstream is(prof);
  std::string line;
  std::getline(is, line);
  while (std::getline(is, line)) {
    EXPECT_NEAR(std::stod(line.substr(line.find(',') + 1)), 1.0 / 3.0, 1e-12);
  }
  const auto bad = write("bad.csv", "location,weight\n0,x\n");
  EXPECT_EQ(run_guarded([&] { return cmd_verify(cfg, bad, out_, err_); }, err_), kExitMalformed);
}

TEST_F(Commands, AssumptionsExamples) {
  EXPECT_EQ(cmd_assumptions(config(fgn(0.75, 0, 2)), out_, err_), kExitOk);
  const auto text = read("assumptions.txt");
  EXPECT_NE(text.find("all_passed = true"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "out" / "assumption_SecondCase.csv"));

  err_.str("");
  EXPECT_EQ(cmd_assumptions(config(fgn(0.5, 0, 2)), out_, err_), kExitFailed);
  EXPECT_NE(err_.str().find("degenerate"), std::string::npos);
  EXPECT_NE(read("assumptions.txt").find("note = degenerate"), std::string::npos);

  EXPECT_EQ(cmd_assumptions(config("[kernel]\nkind = fbm\nH = 0.3\n[interval]\na = 0\nb = 3\n"), out_, err_),
            kExitFailed);
  EXPECT_NE(read("assumptions.txt").find("[NonnegIncrements]\nassumption = NonnegIncrements\npassed = false"),
            std::string::npos);
}

TEST_F(Commands, SimulateWritesCsv) {
  const auto cfg = config("[kernel]\nkind = bm\n[interval]\na = 1\nb = 2\n[mc]\nu = 1, 2\ntrials = 5000\nn = 50\n");
  EXPECT_EQ(cmd_simulate(cfg, out_, err_), kExitOk);
  const auto csv = read("ldp.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "u,trials,hits,p_hat,log_p_over_u2,ci_halfwidth,flag");
  EXPECT_EQ(summary_value(read("ldp_summary.txt"), "theoretical_rate"), -0.5);
}

TEST_F(Commands, SimulateFactorizationFailure) {
  write("k.csv", "i,j,value\n0,0,1\n0,1,2\n1,1,1\n");
  const auto cfg = config("[kernel]\nkind = tabulated\nfile = k.csv\n[mc]\nn = 2\nsigma_sq = 1\n");
  EXPECT_EQ(run_guarded([&] { return cmd_simulate(cfg, out_, err_); }, err_), kExitNumerical);
}

TEST_F(Commands, FiguresDefault) {
  auto cfg = config("[output]\nformat = csv, svg\n");
  cfg.out_dir = dir_ / "out";
  EXPECT_EQ(cmd_figures(cfg, out_, err_), kExitOk);
  for (const char* name : {"fig1_increment_function", "fig2_increment_function_d1",
                           "fig3_increment_function_d2", "fig4_covariance", "fig5_gamma",
                           "fig6_gamma_d1"}) {
    EXPECT_TRUE(fs::exists(dir_ / "out" / (std::string(name) + ".csv"))) << name;
    EXPECT_TRUE(fs::exists(dir_ / "out" / (std::string(name) + ".svg"))) << name;
  }
  std::vector<double> g;
  std::istringstream is(read("fig6_gamma_d1.csv"));
  std::string line;
  std::getline(is, line);
  while (std::getline(is, line)) g.push_back(std::stod(line.substr(line.find(',') + 1)));
  EXPECT_EQ(g.size(), 1001u);
  EXPECT_EQ(value_sign_changes(g), 1);
}

TEST(Figures, CurveShapes) {
  const auto c = figure_curves(Kernel::fgn(0.75, 1.0));
  for (std::size_t i = 1; i < c[0].ys.size(); ++i) EXPECT_GT(c[0].ys[i], c[0].ys[i - 1]);
  for (double v : c[1].ys) EXPECT_GT(v, 0.0);
  EXPECT_EQ(c[3].ys.front(), 1.0);
  for (std::size_t i = 1; i < c[3].ys.size(); ++i) EXPECT_LT(c[3].ys[i], c[3].ys[i - 1]);
  EXPECT_EQ(value_sign_changes(c[5].ys), 1);
  EXPECT_THROW(figure_curves(Kernel::fbm(0.75)), KernelKindError);
}

#ifdef GAUSSMIN_CLI
TEST_F(Workspace, BinaryExitCodes) {
  const std::string cli = GAUSSMIN_CLI;
  const auto code = [](const std::string& cmd) {
    const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  const auto good = write("r.ini", fgn(0.75, 0, 1));
  const auto none = write("n.ini", fgn(0.75, 0, 1.5));
  const auto out = (dir_ / "o").string();
  EXPECT_EQ(code(cli + " rate --config " + good.string() + " --out " + out), 0);
  EXPECT_EQ(code(cli + " rate --config " + none.string() + " --out " + out), 3);
  EXPECT_EQ(code(cli + " rate --config " + (dir_ / "missing.ini").string()), 4);
  EXPECT_EQ(code(cli + " bogus"), 4);
  EXPECT_EQ(code(cli + " verify --config " + good.string() + " --out " + out + " --measure " +
                 (dir_ / "missing.csv").string()),
            4);
}
#endif
