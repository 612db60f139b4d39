#include <cmath>
#include <cstdlib>

#include <gtest/gtest.h>

#include "gaussmin/errors.hpp"
#include "gaussmin/kernel.hpp"
#include "gaussmin/montecarlo.hpp"
#include "gaussmin/random.hpp"
#include "oracles.hpp"

using namespace gaussmin;

TEST(Rng, UniformsAreOpenAndReproducible) {
  const CounterRng rng(42);
  for (std::uint64_t i = 0; i < 10000; ++i) {
    const double u = rng.uniform(3, i);
    EXPECT_GT(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_EQ(u, CounterRng(42).uniform(3, i));
  }
  EXPECT_NE(CounterRng(1).bits(0, 0), CounterRng(2).bits(0, 0));
  EXPECT_NE(rng.bits(0, 1), rng.bits(1, 0));
}

TEST(Rng, NormalMoments) {
  const CounterRng rng(7);
  constexpr int n = 200000;
  std::vector<double> z(n);
  rng.normals(5, z.data(), z.size());
  double m1 = 0, m2 = 0, m4 = 0;
  for (double x : z) {
    m1 += x;
    m2 += x * x;
    m4 += x * x * x * x;
  }
  m1 /= n;
  m2 /= n;
  m4 /= n;
  EXPECT_NEAR(m1, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(m2, 1.0, 5.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(m4, 3.0, 5.0 * std::sqrt(96.0 / n));
}

TEST(Factorize, Identity) {
  const auto f = factorize(Eigen::MatrixXd::Identity(5, 5), 0.0);
  EXPECT_LE((f.lower - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(f.jitter, 0.0);
}

TEST(Factorize, BrownianReconstruction) {
  const auto p = discretize(Kernel::brownian_motion(), Grid(1.0, 2.0, 50));
  const auto f = factorize(p);
  EXPECT_LE((f.lower * f.lower.transpose() - p.matrix).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Factorize, FgnNeedsLittleJitter) {
  const auto f = factorize(discretize(Kernel::fgn(0.75, 1.0), Grid(0.0, 2.0, 100)));
  EXPECT_LE(f.jitter, 1e-10);
  EXPECT_EQ(f.jitter, 1e-12);
}

TEST(Factorize, Errors) {
  Eigen::MatrixXd m(2, 2);
  m << 1, 2, 2, 1;
  EXPECT_THROW(factorize(m), FactorizationError);
  m << 1, 0.5, 0.4, 1;
  EXPECT_THROW(factorize(m), FactorizationError);
  EXPECT_THROW(factorize(Eigen::MatrixXd(2, 3)), FactorizationError);
}

TEST(Tail, SinglePointAtZero) {
  const auto f = factorize(Eigen::MatrixXd::Identity(1, 1), 0.0);
  const auto est = tail_probability(f, 0.0, 100000, 3);
  EXPECT_NEAR(est.p_hat, 0.5, 3.0 * est.standard_error());
}

TEST(Tail, BrownianGridMatchesDiscreteOracle) {
  const auto est = estimate_tail(Kernel::brownian_motion(), 1.0, 2.0, 200, 1.0, 1000000, 1);
  const double exact = oracle::bm_grid_min_exceeds(1.0, 2.0, 200, 1.0);
  EXPECT_NEAR(est.p_hat, exact, 3.0 * est.standard_error());
  // The continuous-path probability is strictly smaller than the grid probability.
  EXPECT_GT(est.p_hat, oracle::bm_min_exceeds(1.0, 2.0, 1.0));
}

TEST(Tail, FbmHighThreshold) {
  const auto est = estimate_tail(Kernel::fbm(0.75), 1.0, 2.0, 200, 3.0, 1000000, 1);
  ASSERT_GT(est.hits, 0u);
  // min over the grid <= X(1) ~ N(0, 1).
  const double single = 1.0 - oracle::normal_cdf(3.0);
  EXPECT_LE(est.p_hat, single + 3.0 * std::sqrt(single / 1e6));
  EXPECT_LT(std::log(est.p_hat) / 9.0, -0.5);
  EXPECT_THROW(estimate_tail(Kernel::fbm(0.75), 1.0, 2.0, 10, 0.0, 10, 1), DomainError);
}

TEST(Sampling, CovarianceMatchesMatrix) {
  const auto p = discretize(Kernel::fgn(0.75, 1.0), Grid(0.0, 2.0, 8));
  const auto f = factorize(p);
  constexpr std::size_t n = 100000;
  const Eigen::MatrixXd x = sample_paths(f, 0, n, 17);
  const Eigen::MatrixXd cov = x * x.transpose() / static_cast<double>(n);
  for (Eigen::Index i = 0; i < cov.rows(); ++i) {
    for (Eigen::Index j = 0; j < cov.cols(); ++j) {
      const double m = p.matrix(i, j);
      const double se = std::sqrt((p.matrix(i, i) * p.matrix(j, j) + m * m) / n);
      EXPECT_NEAR(cov(i, j), m, 5.0 * se) << i << "," << j;
    }
  }
}

TEST(Sampling, PathsDoNotDependOnBatching) {
  const auto f = factorize(discretize(Kernel::brownian_motion(), Grid(0.5, 1.5, 20)));
  const Eigen::MatrixXd all = sample_paths(f, 0, 600, 5);
  const Eigen::MatrixXd tail = sample_paths(f, 300, 300, 5);
  EXPECT_EQ(all.rightCols(300), tail);
}

TEST(Counting, CommonRandomNumbersAreMonotone) {
  const auto f = factorize(discretize(Kernel::fgn(0.75, 1.0), Grid(0.0, 2.0, 50)));
  const auto hits = count_exceedances(f, {0.0, 0.5, 1.0, 1.5, 2.0}, 50000, 2);
  for (std::size_t k = 1; k < hits.size(); ++k) EXPECT_LE(hits[k], hits[k - 1]);
}

TEST(Counting, FinerGridNeverIncreasesHits) {
  const std::size_t n = 26;
  const auto fine = factorize(discretize(Kernel::brownian_motion(), Grid(1.0, 2.0, 2 * n - 1)));
  const std::vector<double> us = {0.5, 1.0, 1.5};
  const auto coarse_hits = count_exceedances(fine, us, 50000, 8, 2);
  const auto fine_hits = count_exceedances(fine, us, 50000, 8, 1);
  for (std::size_t k = 0; k < us.size(); ++k) EXPECT_LE(fine_hits[k], coarse_hits[k]);
}

TEST(Counting, IndependentOfThreadCount) {
  const auto f = factorize(discretize(Kernel::fbm(0.75), Grid(1.0, 2.0, 40)));
  const std::vector<double> us = {0.5, 1.0, 2.0};
  const auto one = count_exceedances(f, us, 20000, 3, 1, 1);
  EXPECT_EQ(one, count_exceedances(f, us, 20000, 3, 1, 2));
  EXPECT_EQ(one, count_exceedances(f, us, 20000, 3, 1, 7));
}

TEST(Ldp, BrownianTrendAndOracle) {
  const std::vector<double> us = {1.0, 1.5, 2.0, 2.5};
  const std::size_t trials = 400000;
  const auto est = ldp_curve(Kernel::brownian_motion(), 1.0, 2.0, 200, us, trials, 1, 1.0);
  EXPECT_EQ(est.theoretical_rate, -0.5);
  EXPECT_TRUE(est.trend_increasing());
  for (std::size_t k = 0; k < us.size(); ++k) {
    EXPECT_LE(est.hits[k], trials);
    EXPECT_LE(est.log_prob[k], 0.0);
    EXPECT_LT(est.normalized[k], -0.5);
    EXPECT_FALSE(est.lower_bound[k]);
    const double p = static_cast<double>(est.hits[k]) / trials;
    const double exact = oracle::bm_grid_min_exceeds(1.0, 2.0, 200, us[k]);
    EXPECT_NEAR(p, exact, 3.0 * std::sqrt(exact * (1 - exact) / trials)) << "u=" << us[k];
  }
}

TEST(Ldp, FgnRateAndBounds) {
  const std::vector<double> us = {1.0, 1.5, 2.0};
  const auto k = Kernel::fgn(0.75, 1.0);
  const double s2 = 0.5744706733790145;
  const auto est = ldp_curve(k, 0.0, 2.0, 200, us, 200000, 1, s2);
  EXPECT_NEAR(est.theoretical_rate, -0.870366448924223, 1e-12);
  EXPECT_TRUE(est.trend_increasing());
  for (std::size_t i = 0; i < us.size(); ++i) {
    const double single = 1.0 - oracle::normal_cdf(us[i]);
    EXPECT_LE(est.normalized[i], std::log(single) / (us[i] * us[i]));
  }
}

TEST(Ldp, ZeroHitsAreFlagged) {
  const auto est = ldp_curve(Kernel::brownian_motion(), 1.0, 2.0, 20, {1.0, 6.0}, 1000, 1, 1.0);
  EXPECT_FALSE(est.lower_bound[0]);
  EXPECT_TRUE(est.lower_bound[1]);
  EXPECT_EQ(est.hits[1], 0u);
  EXPECT_DOUBLE_EQ(est.log_prob[1], std::log(1.0 / 1000));
  EXPECT_TRUE(std::isinf(est.ci_halfwidth[1]));
}

TEST(Ldp, Deterministic) {
  const auto k = Kernel::fgn(0.75, 1.0);
  const auto a = ldp_curve(k, 0.0, 2.0, 60, {1.0, 1.5}, 30000, 9, 0.57);
  const auto b = ldp_curve(k, 0.0, 2.0, 60, {1.0, 1.5}, 30000, 9, 0.57);
  EXPECT_EQ(a.hits, b.hits);
  EXPECT_EQ(a.normalized, b.normalized);
  EXPECT_EQ(a.ci_halfwidth, b.ci_halfwidth);
  const auto c = ldp_curve(k, 0.0, 2.0, 60, {1.0, 1.5}, 30000, 10, 0.57);
  EXPECT_NE(a.hits, c.hits);
}

TEST(Ldp, RejectsBadThresholds) {
  const auto k = Kernel::brownian_motion();
  EXPECT_THROW(ldp_curve(k, 1.0, 2.0, 10, {}, 10, 1, 1.0), DomainError);
  EXPECT_THROW(ldp_curve(k, 1.0, 2.0, 10, {2.0, 1.0}, 10, 1, 1.0), DomainError);
  EXPECT_THROW(ldp_curve(k, 1.0, 2.0, 10, {1.0}, 10, 1, 0.0), DomainError);
}
