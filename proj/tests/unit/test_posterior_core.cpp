#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "stablebip/error.hpp"
#include "stablebip/posterior_core.hpp"
#include "stablebip/rng.hpp"
#include "stablebip/stats.hpp"
#include "stablebip/wellposedness.hpp"
#include "test_support.hpp"

namespace stablebip {
namespace {

using testing::share;

Eigen::MatrixXd random_matrix(Rng& rng, int rows, int cols) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

Eigen::MatrixXd random_spd(Rng& rng, int n) {
  const Eigen::MatrixXd a = random_matrix(rng, n, n);
  return a * a.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n);
}

std::vector<double> vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

TEST(GaussianPotential, IdentityExamples) {
  const auto phi = gaussian_potential({Eigen::MatrixXd::Identity(3, 3), "id"}, NoiseModel::isotropic(3, 1.0));
  const std::vector<double> y = {0.3, -1.0, 2.0};
  EXPECT_EQ(phi.evaluate(y, y), 0.0);
  std::vector<double> u = y;
  u[1] += 1.0;
  EXPECT_DOUBLE_EQ(phi.evaluate(u, y), 0.5);
}

TEST(GaussianPotential, MatchesDenseSolve) {
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    const Eigen::MatrixXd g = random_matrix(rng, 5, 8);
    const Eigen::MatrixXd gamma = random_spd(rng, 5);
    Eigen::VectorXd u(8), y(5);
    for (int i = 0; i < 8; ++i) u(i) = rng.normal();
    for (int i = 0; i < 5; ++i) y(i) = rng.normal();
    const Eigen::VectorXd r = g * u - y;
    const double oracle = 0.5 * r.dot(gamma.partialPivLu().solve(r));
    const auto phi = gaussian_potential({g, "random"}, NoiseModel(gamma));
    EXPECT_NEAR(phi.evaluate(vec(u), vec(y)) / oracle, 1.0, 1e-10);
  }
}

TEST(GaussianPotential, WhiteningInvariance) {
  Rng rng(2);
  const Eigen::MatrixXd g = random_matrix(rng, 4, 6);
  const Eigen::MatrixXd gamma = random_spd(rng, 4);
  const NoiseModel noise(gamma);
  Eigen::VectorXd u(6), y(4);
  for (int i = 0; i < 6; ++i) u(i) = rng.normal();
  for (int i = 0; i < 4; ++i) y(i) = rng.normal();
  const auto direct = gaussian_potential({g, ""}, noise);
  const auto whitened = gaussian_potential({noise.whiten(g), ""}, NoiseModel::isotropic(4, 1.0));
  EXPECT_NEAR(direct.evaluate(vec(u), vec(y)), whitened.evaluate(vec(u), vec(noise.whiten(y))), 1e-10);
}

TEST(NoiseModel, RejectsBadCovariances) {
  Eigen::MatrixXd asym(2, 2);
  asym << 1.0, 0.5, 0.4, 1.0;
  EXPECT_THROW(NoiseModel{asym}, DomainError);
  Eigen::MatrixXd indef(2, 2);
  indef << 1.0, 2.0, 2.0, 1.0;
  EXPECT_THROW(NoiseModel{indef}, FactorizationError);
  EXPECT_THROW(NoiseModel::isotropic(3, 0.0), DomainError);
  EXPECT_THROW(gaussian_potential({Eigen::MatrixXd::Identity(3, 3), ""}, NoiseModel::isotropic(2, 1.0)),
               ShapeError);
}

TEST(EstimateZ, ConstantPotentials) {
  const auto draws = draw_prior_batch(testing::cauchy_prior(8, BasisFamily::kFourier), 1, 100);
  const std::vector<double> y = {0.0};
  const auto z0 = estimate_z(draws, constant_potential(0.0), y);
  EXPECT_EQ(z0.z, 1.0);
  EXPECT_EQ(z0.std_error, 0.0);
  const auto zc = estimate_z(draws, constant_potential(2.5), y);
  EXPECT_EQ(zc.z, std::exp(-2.5));
  EXPECT_THROW(estimate_z(PriorDraws(1), constant_potential(0.0), y), DomainError);
  EXPECT_THROW(estimate_z(PriorDraws{}, constant_potential(0.0), y), DomainError);
}

TEST(EstimateZ, ScalarConjugateEvidence) {
  const auto prior = testing::scalar_gaussian_prior(1.0);  // variance 2
  const auto draws = draw_prior_batch(prior, 3, 100000);
  const Eigen::MatrixXd g = Eigen::MatrixXd::Constant(1, 1, 1.5);
  const NoiseModel noise = NoiseModel::isotropic(1, 0.8);
  const std::vector<double> y = {0.9};
  const auto z = estimate_z(draws, gaussian_potential({g, ""}, noise), y);
  // N(y; 0, 1.5^2 * 2 + 0.64) * sqrt(2 pi * 0.64).
  const double s = 1.5 * 1.5 * 2.0 + 0.64;
  const double analytic = std::exp(-0.5 * 0.81 / s) / std::sqrt(2.0 * std::numbers::pi * s) *
                          std::sqrt(2.0 * std::numbers::pi * 0.64);
  EXPECT_NEAR(z.z, analytic, 3.0 * z.std_error);
  EXPECT_NEAR(std::exp(conjugate_log_evidence(g, Eigen::VectorXd::Zero(1),
                                              Eigen::MatrixXd::Constant(1, 1, 2.0), noise,
                                              Eigen::VectorXd::Constant(1, 0.9))),
              analytic, 1e-14);
}

TEST(BuildPosterior, UniformAndTwoLevelWeights) {
  const auto draws = share(draw_prior_batch(testing::cauchy_prior(8, BasisFamily::kFourier), 1, 1000));
  const std::vector<double> y = {0.0};
  const auto flat = build_posterior(draws, constant_potential(0.0), y);
  for (double w : flat.weights) EXPECT_EQ(w, 1.0 / 1000.0);
  EXPECT_NEAR(flat.ess, 1000.0, 1e-9);

  std::vector<char> penalised(1000);
  for (std::size_t i = 0; i < 1000; ++i) penalised[i] = (i % 2 == 0);
  const auto phi = fixed_potential([&](std::span<const double> u) {
    for (std::size_t i = 0; i < draws->size(); ++i) {
      if ((*draws)[i].grid_values.data() == u.data()) return penalised[i] ? 1e6 : 0.0;
    }
    return 0.0;
  });
  const auto half = build_posterior(draws, phi, y);
  for (std::size_t i = 0; i < 1000; ++i) {
    EXPECT_NEAR(half.weights[i], penalised[i] ? 0.0 : 1.0 / 500.0, 1e-12);
  }
}

TEST(BuildPosterior, ShiftInvarianceAndNormalisation) {
  const auto prior = testing::cauchy_prior(16, BasisFamily::kDifference, 0.3);
  const auto draws = share(draw_prior_batch(prior, 4, 5000));
  Rng rng(5);
  Eigen::MatrixXd g(3, 16);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 16; ++j) g(i, j) = rng.normal() / 4.0;
  const auto base = gaussian_potential({g, ""}, NoiseModel::isotropic(3, 0.5));
  Potential shifted = base;
  shifted.evaluate = [base](std::span<const double> u, std::span<const double> y) {
    return base.evaluate(u, y) + 37.0;
  };
  const std::vector<double> y = {0.2, -0.1, 0.4};
  const auto a = build_posterior(draws, base, y);
  const auto b = build_posterior(draws, shifted, y);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_NEAR(a.weights[i], b.weights[i], 1e-12 * (1.0 + a.weights[i]));
    sum += a.weights[i];
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
  EXPECT_GE(a.ess, 1.0);
  EXPECT_LE(a.ess, 5000.0);
  EXPECT_GT(a.z.z, 0.0);
  EXPECT_TRUE(std::isfinite(a.z.z));
}

TEST(BuildPosterior, ConjugateMeanWithinThreeStandardErrors) {
  const auto prior = testing::scalar_gaussian_prior(1.0);
  const auto draws = share(draw_prior_batch(prior, 6, 100000));
  const Eigen::MatrixXd g = Eigen::MatrixXd::Ones(1, 1);
  const NoiseModel noise = NoiseModel::isotropic(1, 1.0);
  const std::vector<double> y = {1.3};
  const auto post = build_posterior(draws, gaussian_potential({g, ""}, noise), y);
  std::vector<double> u(draws->size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = (*draws)[i].grid_values[0];
  const auto m = stats::weighted_moments(post.weights, u);
  const auto oracle = conjugate_posterior_oracle(g, Eigen::VectorXd::Zero(1),
                                                 Eigen::MatrixXd::Constant(1, 1, 2.0), noise,
                                                 Eigen::VectorXd::Constant(1, 1.3));
  EXPECT_NEAR(m.mean, oracle.posterior_mean(0), 3.0 * m.mean_std_error);
}

TEST(BuildPosterior, DegenerateWeights) {
  const auto draws = share(draw_prior_batch(testing::cauchy_prior(4, BasisFamily::kFourier), 1, 10));
  const std::vector<double> y = {0.0};
  EXPECT_THROW(build_posterior(draws, constant_potential(INFINITY), y), DegenerateWeightsError);
  EXPECT_THROW(build_posterior(draws, constant_potential(NAN), y), DegenerateWeightsError);
}

TEST(VerifyBounds, GaussianPotentialHasNoViolations) {
  Rng rng(7);
  for (int t = 0; t < 10; ++t) {
    const Eigen::MatrixXd g = Eigen::MatrixXd::Constant(1, 1, rng.normal());
    const NoiseModel noise = NoiseModel::isotropic(1, 0.3 + std::abs(rng.normal()));
    const auto phi = gaussian_potential({g, ""}, noise);
    const auto draws = draw_prior_batch(testing::scalar_gaussian_prior(2.0), 10 + t, 300);
    const double r = 3.0;
    std::vector<std::vector<double>> ys;
    for (int k = 0; k < 20; ++k) ys.push_back({-r + (k + 0.5) * (2.0 * r / 20.0)});
    const auto report = verify_bounds(phi, draws, ys, r);
    EXPECT_TRUE(report.passed());
    EXPECT_EQ(report.checks, 300u * (20u + 190u));
  }
}

TEST(VerifyBounds, MultivariateBoundAgainstBruteForce) {
  Rng rng(8);
  const Eigen::MatrixXd g = random_matrix(rng, 4, 16);
  const auto phi = gaussian_potential({g, ""}, NoiseModel(random_spd(rng, 4)));
  const auto draws = draw_prior_batch(testing::cauchy_prior(16, BasisFamily::kDifference, 0.5), 9, 400);
  std::vector<std::vector<double>> ys;
  for (int k = 0; k < 8; ++k) {
    std::vector<double> y(4);
    for (double& v : y) v = 0.4 * rng.normal();
    ys.push_back(y);
  }
  EXPECT_TRUE(verify_bounds(phi, draws, ys, 5.0).passed());
}

TEST(VerifyBounds, SingletonAndRadius) {
  const auto phi = gaussian_potential({Eigen::MatrixXd::Identity(2, 2), ""}, NoiseModel::isotropic(2, 1.0));
  const auto draws = draw_prior_batch(testing::cauchy_prior(2, BasisFamily::kCanonical), 1, 20);
  EXPECT_TRUE(verify_bounds(phi, draws, {{0.5, 0.5}}, 1.0).passed());
  EXPECT_THROW(verify_bounds(phi, draws, {{1.0, 0.0}}, 1.0), RadiusError);
}

TEST(VerifyBounds, DetectsAnUnderstatedBound) {
  Potential bad = gaussian_potential({Eigen::MatrixXd::Identity(1, 1), ""}, NoiseModel::isotropic(1, 1.0));
  bad.bound_m1 = [](double, double) { return 1.0; };
  bad.bound_m2 = [](double, double) { return std::log(1e-6); };
  const auto draws = draw_prior_batch(testing::scalar_gaussian_prior(1.0), 1, 20);
  const auto report = verify_bounds(bad, draws, {{0.0}, {0.5}}, 1.0);
  EXPECT_FALSE(report.passed());
}

}  // namespace
}  // namespace stablebip
