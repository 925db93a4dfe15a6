#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "bellsig/error.hpp"
#include "bellsig/estimators.hpp"
#include "bellsig/ns_mle.hpp"
#include "oracles.hpp"

namespace bellsig {
namespace {

CountsTable table_from(const std::array<std::int64_t, 16>& n) {
  CountsTable t;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) t.at(x, y, a, b) = n[CountsTable::flat(x, y, a, b)];
  return t;
}

CountsTable proportional_table(const NSParams& p, std::int64_t per_setting) {
  CountsTable t;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          t.at(x, y, a, b) = std::llround(p.cell(x, y, a, b) * static_cast<double>(per_setting));
  return t;
}

// Random table with every count in [lo, hi].
CountsTable random_table(std::mt19937_64& rng, int lo, int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  CountsTable t;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) t.at(x, y, a, b) = d(rng);
  return t;
}

double poisson_terms(const CountsTable& t) {
  double s = 0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      const double n = static_cast<double>(t.total(x, y));
      s += n * std::log(n) - n;
    }
  return s;
}

TEST(NsMle, UniformTableGivesUniformParameters) {
  CountsTable t;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) t.at(x, y, a, b) = 250;
  const NsFit fit = ns_mle(t);
  for (double a : fit.params.alice) EXPECT_NEAR(a, 0.5, 1e-10);
  for (double b : fit.params.bob) EXPECT_NEAR(b, 0.5, 1e-10);
  for (const auto& row : fit.params.joint)
    for (double c : row) EXPECT_NEAR(c, 0.25, 1e-10);
}

TEST(NsMle, RecoversNonsignalingFrequencies) {
  NSParams p;
  p.alice = {0.5, 0.5};
  p.bob = {0.5, 0.5};
  // Correlations of the ideal source at the optimal angles.
  const double e = 0.994 / std::sqrt(2.0);
  p.joint = {{{0.25 * (1 + e), 0.25 * (1 - e)}, {0.25 * (1 + e), 0.25 * (1 + e)}}};
  const CountsTable t = proportional_table(p, 1 << 20);
  const NsFit fit = ns_mle(t);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          EXPECT_NEAR(fit.params.cell(x, y, a, b),
                      static_cast<double>(t.at(x, y, a, b)) / static_cast<double>(t.total(x, y)), 1e-9);
  EXPECT_NEAR(fit.log_likelihood, unconstrained_log_likelihood(t), 1e-9 * std::abs(fit.log_likelihood));
}

TEST(NsMle, LikelihoodMatchesExactlyForAsymmetricNonsignalingTable) {
  // Marginals away from 1/2, counts exactly proportional (per setting 1000).
  NSParams p;
  p.alice = {0.6, 0.3};
  p.bob = {0.4, 0.7};
  p.joint = {{{0.3, 0.5}, {0.2, 0.25}}};
  ASSERT_TRUE(p.feasible());
  const CountsTable t = proportional_table(p, 1000);
  const NsFit fit = ns_mle(t);
  EXPECT_NEAR(fit.log_likelihood, unconstrained_log_likelihood(t), 1e-9);
  EXPECT_NEAR(lr_test(t).xi, 0.0, 1e-9);
}

TEST(NsMle, MatchesCoordinateAscentOracleOnFixedCorpus) {
  std::mt19937_64 rng(20240611);
  for (int i = 0; i < 50; ++i) {
    const CountsTable t = random_table(rng, 1, 30);
    const double oracle_value = oracle::ns_max_loglik_coordinate_ascent(t) + poisson_terms(t);
    const NsFit fit = ns_mle(t);
    EXPECT_TRUE(fit.params.feasible());
    EXPECT_NEAR(fit.log_likelihood, oracle_value, 1e-6) << "table " << i;
  }
}

TEST(NsMle, BoundaryOptimumWithZeroCells) {
  // Cells forced to the Frechet boundary by zero counts.
  const CountsTable t = table_from({50, 0, 0, 50, 40, 0, 10, 50, 0, 30, 30, 40, 45, 5, 0, 50});
  const NsFit fit = ns_mle(t);
  EXPECT_TRUE(fit.params.feasible(1e-12));
  // No feasible point does better: sample the polytope around the fit.
  std::mt19937_64 rng(3);
  std::normal_distribution<double> jitter(0.0, 0.02);
  const auto base = fit.params.to_vector();
  for (int i = 0; i < 20000; ++i) {
    std::array<double, 8> v = base;
    for (double& c : v) c += jitter(rng);
    const NSParams q = NSParams::from_vector(v);
    if (!q.feasible(0.0)) continue;
    ASSERT_LE(ns_log_likelihood(t, q), fit.log_likelihood + 1e-9);
  }
}

TEST(NsMle, RandomSparseTablesStayFeasibleAndBeatPerturbations) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 40; ++i) {
    CountsTable t = random_table(rng, 0, 6);
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y)
        if (t.total(x, y) == 0) t.at(x, y, 0, 0) = 1;
    const NsFit fit = ns_mle(t);
    ASSERT_TRUE(fit.params.feasible(1e-12));
    EXPECT_LE(fit.log_likelihood, unconstrained_log_likelihood(t) + 1e-9);
    const double oracle_value = oracle::ns_objective(t, fit.params.to_vector()) + poisson_terms(t);
    EXPECT_NEAR(fit.log_likelihood, oracle_value, 1e-9);
  }
}

TEST(NsMle, DegreesOfFreedomFromConstraintRank) {
  // Unconstrained space: per setting, (P(+,+), P(+,-), P(-,+)), 12 coordinates.
  // Nonsignaling: Alice's +1 marginal equal across y, Bob's across x.
  Eigen::Matrix<double, 4, 12> c = Eigen::Matrix<double, 4, 12>::Zero();
  auto col = [](int x, int y, int cell) { return 3 * (2 * x + y) + cell; };
  for (int x = 0; x < 2; ++x) {
    c(x, col(x, 0, 0)) = 1;
    c(x, col(x, 0, 1)) = 1;
    c(x, col(x, 1, 0)) = -1;
    c(x, col(x, 1, 1)) = -1;
  }
  for (int y = 0; y < 2; ++y) {
    c(2 + y, col(0, y, 0)) = 1;
    c(2 + y, col(0, y, 2)) = 1;
    c(2 + y, col(1, y, 0)) = -1;
    c(2 + y, col(1, y, 2)) = -1;
  }
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(c);
  EXPECT_EQ(lu.rank(), 4);
  EXPECT_EQ(lu.rank(), lr_test(table_from({5, 6, 7, 8, 9, 1, 2, 3, 4, 5, 6, 7, 8, 9, 1, 2})).dof);
}

TEST(LrTest, NonsignalingCountsHaveNoSignificance) {
  NSParams p;
  const double e = 0.7;
  p.joint = {{{0.25 * (1 + e), 0.25 * (1 - e)}, {0.25 * (1 + e), 0.25 * (1 + e)}}};
  const SignalingReport r = lr_test(proportional_table(p, 200000));
  EXPECT_NEAR(r.xi, 0.0, 1e-8);
  EXPECT_NEAR(r.log_p, 0.0, 1e-8);
  EXPECT_NEAR(r.sigma, 0.0, 1e-6);
  EXPECT_EQ(r.dof, 4);
}

TEST(LrTest, NonnegativeOnRandomTables) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const SignalingReport r = lr_test(random_table(rng, 1, 1000));
    ASSERT_GE(r.xi, 0.0);
    ASSERT_LE(r.log_p, 0.0);
    ASSERT_GE(r.sigma, 0.0);
  }
}

TEST(LrTest, InvariantUnderOutcomeRelabelingAndPartySwap) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 50; ++i) {
    const CountsTable t = random_table(rng, 5, 500);
    CountsTable flipped, swapped;
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y)
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) {
            flipped.at(x, y, 1 - a, 1 - b) = t.at(x, y, a, b);
            swapped.at(y, x, b, a) = t.at(x, y, a, b);
          }
    const double xi = lr_test(t).xi;
    EXPECT_NEAR(lr_test(flipped).xi, xi, 1e-9 * std::max(1.0, xi));
    EXPECT_NEAR(lr_test(swapped).xi, xi, 1e-9 * std::max(1.0, xi));
  }
}

TEST(LrTest, StatisticScalesLinearlyWithCounts) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 20; ++i) {
    const CountsTable t = random_table(rng, 50, 400);
    const double xi = lr_test(t).xi;
    const double s = estimate_chsh(t).S;
    for (std::int64_t k : {2, 3, 7, 100}) {
      const CountsTable tk = t.scaled(k);
      EXPECT_EQ(estimate_chsh(tk).S, s);
      EXPECT_NEAR(lr_test(tk).xi / (static_cast<double>(k) * xi), 1.0, 1e-9);
    }
  }
}

TEST(LrTest, MissingSettingIsAnError) {
  CountsTable t;
  t.at(0, 0, 0, 0) = 5;
  EXPECT_THROW(lr_test(t), ValidationError);
}

}  // namespace
}  // namespace bellsig
