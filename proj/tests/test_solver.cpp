#include <cmath>

#include <gtest/gtest.h>

#include "gaussmin/energy.hpp"
#include "gaussmin/errors.hpp"
#include "gaussmin/kernel.hpp"
#include "gaussmin/measure.hpp"
#include "gaussmin/solver.hpp"
#include "oracles.hpp"

using namespace gaussmin;

TEST(Discretize, BrownianMotion) {
  const auto p = discretize(Kernel::brownian_motion(), Grid(1.0, 2.0, 3));
  Eigen::Matrix3d expected;
  expected << 1, 1, 1, 1, 1.5, 1.5, 1, 1.5, 2;
  EXPECT_EQ(p.matrix, expected);
}

TEST(Discretize, TriangularFgnIsIdentity) {
  const auto p = discretize(Kernel::fgn(0.5, 1.0), Grid(0.0, 2.0, 3));
  EXPECT_LE((p.matrix - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Solve, IdentityGivesUniform) {
  const auto res = solve(make_problem(Grid(0.0, 1.0, 4), Eigen::MatrixXd::Identity(4, 4)));
  EXPECT_TRUE(res.converged);
  EXPECT_NEAR(res.energy, 0.25, 1e-12);
  for (double w : res.weights) EXPECT_NEAR(w, 0.25, 1e-12);
}

TEST(Solve, TriangularFgnThreePoints) {
  const Grid g(0.0, 2.0, 201);
  const auto res = solve(discretize(Kernel::fgn(0.5, 1.0), g), 1e-9);
  EXPECT_TRUE(res.converged);
  EXPECT_NEAR(res.energy, 1.0 / 3.0, 1e-6);
  const auto mu = extract_measure(res, g);
  ASSERT_EQ(mu.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(mu.atoms()[i].location, static_cast<double>(i), 0.02);
}

TEST(Solve, FbmConcentratesAtLeftEndpoint) {
  const auto res = solve(discretize(Kernel::fbm(0.75), Grid(1.0, 2.0, 201)));
  EXPECT_NEAR(res.energy, 1.0, 1e-6);
  EXPECT_GE(res.weights.front(), 1.0 - 1e-4);
}

TEST(Solve, EnergyTraceIsMonotone) {
  std::vector<double> trace;
  const auto p = discretize(Kernel::fgn(0.75, 1.0), Grid(0.0, 2.0, 101));
  const auto res = solve(p, 1e-10, 200000, &trace);
  ASSERT_GT(trace.size(), 2u);
  for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_LE(trace[i], trace[i - 1] + 1e-15);
  EXPECT_NEAR(trace.back(), res.energy, 1e-10);
}

TEST(Solve, GapIsTwiceEquilibriumDefect) {
  const auto p = discretize(Kernel::fgn(0.75, 1.0), Grid(0.0, 1.5, 151));
  for (std::size_t iters : {5u, 50u, 100000u}) {
    const auto res = solve(p, 1e-9, iters);
    const auto phi = solver_potential(p, res.weights);
    const double mn = *std::min_element(phi.begin(), phi.end());
    EXPECT_NEAR(res.equilibrium_gap, 2.0 * (res.energy - mn), 1e-12);
    EXPECT_EQ(res.converged, res.equilibrium_gap <= 1e-9);
    double total = 0.0;
    for (double w : res.weights) {
      EXPECT_GE(w, 0.0);
      total += w;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(Solve, NonConvergenceIsReported) {
  const auto res = solve(discretize(Kernel::fgn(0.75, 1.0), Grid(0.0, 2.0, 101)), 1e-12, 1);
  EXPECT_FALSE(res.converged);
  EXPECT_EQ(res.iterations, 1u);
}

TEST(Solve, RejectsBadArguments) {
  const auto p = make_problem(Grid(0.0, 1.0, 2), Eigen::MatrixXd::Identity(2, 2));
  EXPECT_THROW(solve(p, 0.0), DomainError);
  EXPECT_THROW(solve(p, 1e-9, 0), DomainError);
  EXPECT_THROW(make_problem(Grid(0.0, 1.0, 3), Eigen::MatrixXd::Identity(2, 2)), GridError);
}

TEST(Solve, AgreesWithClosedForms) {
  const auto k = Kernel::fgn(0.75, 1.0);
  {
    const Grid g(0.0, 2.0, 401);
    const auto res = solve(discretize(k, g));
    const auto mu = three_point(0.0, 1.0, c_star(k, 1.0));
    EXPECT_NEAR(res.energy, energy(k, mu), 1e-6);
    EXPECT_LE(res.energy, energy(k, mu) + 1e-12);
  }
  for (double b : {0.25, 0.5, 1.0}) {
    const Grid g(0.0, b, 401);
    const auto res = solve(discretize(k, g));
    EXPECT_NEAR(res.energy, energy(k, two_point(0.0, b)), 1e-6);
  }
  for (double a : {0.5, 1.0, 2.0}) {
    const auto res = solve(discretize(Kernel::fbm(0.9), Grid(a, a + 1.0, 401)));
    EXPECT_NEAR(res.energy, std::pow(a, 1.8), 1e-6);
  }
}

TEST(Extract, DiracAtFirstNode) {
  const Grid g(0.0, 1.0, 5);
  SolverResult r;
  r.weights = {1.0, 0.0, 0.0, 0.0, 0.0};
  const auto mu = extract_measure(r, g);
  ASSERT_EQ(mu.size(), 1u);
  EXPECT_EQ(mu.atoms()[0].location, 0.0);
  r.weights = {0.0, 0.0, 0.0, 0.0, 0.0};
  EXPECT_THROW(extract_measure(r, g), EmptyMeasureError);
  r.weights = {0.5, 0.5};
  EXPECT_THROW(extract_measure(r, g), GridError);
}

TEST(Extract, TwoPointFgn) {
  const Grid g(0.0, 1.0, 401);
  const auto mu = extract_measure(solve(discretize(Kernel::fgn(0.75, 1.0), g)), g);
  ASSERT_EQ(mu.size(), 2u);
  EXPECT_NEAR(mu.atoms()[0].location, 0.0, 1e-9);
  EXPECT_NEAR(mu.atoms()[1].location, 1.0, 1e-9);
  for (const auto& at : mu.atoms()) EXPECT_NEAR(at.weight, 0.5, 0.01);
}

TEST(Extract, ThreePointFgn) {
  const auto k = Kernel::fgn(0.75, 1.0);
  const Grid g(0.0, 2.0, 401);
  const auto mu = extract_measure(solve(discretize(k, g)), g);
  ASSERT_EQ(mu.size(), 3u);
  EXPECT_NEAR(mu.atoms()[1].location, 1.0, 0.01);
  const double cs = c_star(k, 1.0);
  EXPECT_NEAR(mu.atoms()[1].weight, cs / (2.0 + cs), 0.01);
  EXPECT_NEAR(mu.atoms()[1].weight, 0.2736, 0.01);
}

TEST(BruteForce, SolverIsNeverBeaten) {
  const Kernel kernels[] = {Kernel::brownian_motion(),
                            Kernel::fbm(0.3),
                            Kernel::fbm(0.75),
                            Kernel::fgn(0.5, 1.0),
                            Kernel::fgn(0.75, 1.0),
                            Kernel::fgn(0.3, 0.5),
                            Kernel::increment_of(Kernel::brownian_motion(), 0.7),
                            Kernel::increment_of(Kernel::fbm(0.9), 1.0)};
  for (const auto& k : kernels) {
    for (std::size_t n : {5u, 12u}) {
      const double a = k.is<BrownianMotion>() || k.is<FractionalBM>() ? 0.5 : 0.0;
      const auto p = discretize(k, Grid(a, a + 2.0, n));
      const auto res = solve(p);
      EXPECT_GE(oracle::brute_force_energy(p.matrix), res.energy - 1e-4) << k.describe();
    }
  }
}
