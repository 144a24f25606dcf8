#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "stablebip/deconvolution.hpp"
#include "stablebip/error.hpp"
#include "stablebip/wellposedness.hpp"
#include "test_support.hpp"

namespace stablebip {
namespace {

TEST(DeconvolutionOperator, ZeroWidthIsPointEvaluation) {
  const Eigen::MatrixXd g = deconvolution_operator(4, 4, 0.0);
  EXPECT_EQ(g, Eigen::MatrixXd::Identity(4, 4));
  const Eigen::MatrixXd coarse = deconvolution_operator(8, 2, 0.0);
  for (int i = 0; i < 8; ++i) {
    EXPECT_EQ(coarse(0, i), i == 2 ? 1.0 : 0.0);
    EXPECT_EQ(coarse(1, i), i == 6 ? 1.0 : 0.0);
  }
}

TEST(DeconvolutionOperator, EntriesAreKernelMassOverCells) {
  const double w = 0.07;
  const Eigen::MatrixXd g = deconvolution_operator(10, 5, w);
  const auto x = observation_points(5);
  for (int j = 0; j < 5; ++j) {
    double row = 0.0;
    for (int i = 0; i < 10; ++i) {
      const double expected = testing::normal_cdf(((i + 1) / 10.0 - x[j]) / w) -
                              testing::normal_cdf((i / 10.0 - x[j]) / w);
      EXPECT_NEAR(g(j, i), expected, 1e-15);
      EXPECT_GE(g(j, i), 0.0);
      row += g(j, i);
    }
    const double inside = testing::normal_cdf((1.0 - x[j]) / w) - testing::normal_cdf(-x[j] / w);
    EXPECT_NEAR(row, inside, 1e-14);
  }
}

TEST(DeconvolutionOperator, GeometryErrors) {
  EXPECT_THROW(deconvolution_operator(4, 8, 0.1), GeometryError);
  EXPECT_THROW(deconvolution_operator(8, 4, 1.5), GeometryError);
  EXPECT_THROW(deconvolution_operator(8, 4, -0.1), DomainError);
  DeconvolutionSpec spec;
  spec.kernel_width = 2.0;
  EXPECT_THROW(validate(spec), GeometryError);
  EXPECT_THROW(step_signal_data({{0.5, 1.0}}, 4, 2.0, 0.0, 1), GeometryError);
}

TEST(DeconvolutionFamily, Shapes) {
  DeconvolutionSpec spec;
  spec.noise_sigma = 1.0;
  const auto p = make_deconvolution_family(32, spec);
  EXPECT_EQ(p.noise.covariance(), Eigen::MatrixXd::Identity(16, 16));
  EXPECT_EQ(p.model.grid_size(), 32u);
  EXPECT_EQ(p.prior.basis.family, BasisFamily::kDifference);
  EXPECT_EQ(p.prior.truncation, 32u);
  EXPECT_NEAR(p.prior.gammas[3], 0.1 / 16.0, 1e-15);

  spec.scale_rule = DeconvolutionSpec::ScaleRule::kIncrement;
  const auto inc = make_deconvolution_family(32, spec);
  EXPECT_EQ(inc.prior.gammas[0], 0.1);
  EXPECT_NEAR(inc.prior.gammas[5], 0.1 / 32.0, 1e-15);
  EXPECT_FALSE(inc.prior.gamma_form.has_value());
  EXPECT_EQ(scale_rule_from_string(to_string(spec.scale_rule)), spec.scale_rule);
  EXPECT_THROW(scale_rule_from_string("linear"), DomainError);
}

TEST(DeconvolutionFamily, RefinementConvergesToTheContinuum) {
  // A step at 0.3 written on the grid: its blurred data converge to the exact
  // continuum data as the grid refines.
  const double w = 3.0 / 64.0;
  const auto exact = step_signal_data({{0.3, 1.0}}, 16, w, 0.0, 0);
  for (std::size_t n : {64u, 128u}) {
    const Eigen::MatrixXd g = deconvolution_operator(n, 16, w);
    Eigen::VectorXd u(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) u(i) = (static_cast<double>(i) + 0.5) / n >= 0.3 ? 1.0 : 0.0;
    const Eigen::VectorXd y = g * u;
    double err = 0.0, ref = 0.0;
    for (int j = 0; j < 16; ++j) {
      err += (y(j) - exact[j]) * (y(j) - exact[j]);
      ref += exact[j] * exact[j];
    }
    EXPECT_LT(std::sqrt(err / ref), 0.02) << n;
  }
}

TEST(StepSignal, NoiseAndDeterminism) {
  const auto clean = step_signal_data({{0.0, 1.0}}, 8, 0.0, 0.0, 0);
  for (double v : clean) EXPECT_EQ(v, 1.0);
  const auto a = step_signal_data({{0.5, 1.0}}, 8, 0.05, 0.01, 9);
  const auto b = step_signal_data({{0.5, 1.0}}, 8, 0.05, 0.01, 9);
  const auto c = step_signal_data({{0.5, 1.0}}, 8, 0.05, 0.01, 10);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  EXPECT_THROW(step_signal_data({{1.0, 1.0}}, 8, 0.05, 0.0, 0), DomainError);
}

}  // namespace
}  // namespace stablebip
