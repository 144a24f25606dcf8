#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "stablebip/rng.hpp"
#include "stablebip/stats.hpp"
#include "test_support.hpp"

namespace stablebip {
namespace {

TEST(KolmogorovSurvival, MatchesTabulatedValues) {
  // Critical values of the limiting distribution.
  EXPECT_NEAR(stats::kolmogorov_survival(1.3581), 0.05, 1e-4);
  EXPECT_NEAR(stats::kolmogorov_survival(1.6276), 0.01, 1e-4);
  EXPECT_NEAR(stats::kolmogorov_survival(1.2238), 0.10, 1e-4);
  EXPECT_DOUBLE_EQ(stats::kolmogorov_survival(0.0), 1.0);
}

TEST(KolmogorovSurvival, BothBranchesAgreeAtTheSwitch) {
  const double below = stats::kolmogorov_survival(1.18 - 1e-9);
  const double above = stats::kolmogorov_survival(1.18 + 1e-9);
  EXPECT_NEAR(below, above, 1e-8);
}

TEST(KsOneSample, UniformSampleAgainstItsCdf) {
  Rng rng(3);
  std::vector<double> x(20000);
  for (double& v : x) v = rng.uniform_open();
  const auto r = stats::ks_one_sample(x, [](double t) { return std::clamp(t, 0.0, 1.0); });
  EXPECT_LT(r.statistic, 1.36 / std::sqrt(20000.0) + 0.002);
  EXPECT_GT(r.p_value, 0.001);
}

TEST(KsOneSample, DetectsAShift) {
  Rng rng(4);
  std::vector<double> x(5000);
  for (double& v : x) v = rng.normal() + 0.2;
  const auto r = stats::ks_one_sample(x, [](double t) { return testing::normal_cdf(t); });
  EXPECT_LT(r.p_value, 1e-6);
}

TEST(KsTwoSample, IdenticalSamplesGiveZero) {
  std::vector<double> a = {0.1, 0.5, 0.3, 0.9};
  const auto r = stats::ks_two_sample(a, a);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
}

TEST(KsTwoSample, DisjointSamplesGiveOne) {
  std::vector<double> a = {0.0, 1.0, 2.0};
  std::vector<double> b = {5.0, 6.0, 7.0};
  EXPECT_EQ(stats::ks_two_sample(a, b).statistic, 1.0);
}

TEST(Quantile, LinearInterpolationBetweenOrderStatistics) {
  EXPECT_DOUBLE_EQ(stats::quantile({-1.0, 3.0}, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(stats::quantile({4.0, 1.0, 3.0, 2.0}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(stats::quantile({4.0, 1.0, 3.0, 2.0}, 1.0 / 3.0), 2.0);
  EXPECT_DOUBLE_EQ(stats::quantile({7.0}, 0.9), 7.0);
}

TEST(MeanWithError, KnownValues) {
  const std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
  const auto m = stats::mean_with_error(x);
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_NEAR(m.std_error, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
}

TEST(WeightedMoments, UniformWeightsReduceToPlainMoments) {
  const std::vector<double> x = {1.0, 2.0, 3.0, 6.0};
  const std::vector<double> w(4, 0.25);
  const auto m = stats::weighted_moments(w, x);
  EXPECT_DOUBLE_EQ(m.mean, 3.0);
  EXPECT_DOUBLE_EQ(m.variance, (4.0 + 1.0 + 0.0 + 9.0) / 4.0);
}

TEST(EffectiveSampleSize, ConstantAndIndependentSeries) {
  const std::vector<double> flat(500, 2.0);
  EXPECT_DOUBLE_EQ(stats::effective_sample_size(flat), 500.0);
  Rng rng(11);
  std::vector<double> iid(4000);
  for (double& v : iid) v = rng.normal();
  const double ess = stats::effective_sample_size(iid);
  EXPECT_GT(ess, 3000.0);
  EXPECT_LE(ess, 4000.0);
}

TEST(EffectiveSampleSize, StronglyCorrelatedSeriesIsSmall) {
  Rng rng(12);
  std::vector<double> ar(20000);
  double x = 0.0;
  for (double& v : ar) {
    x = 0.99 * x + rng.normal();
    v = x;
  }
  // tau = (1 + rho) / (1 - rho) = 199.
  const double ess = stats::effective_sample_size(ar);
  EXPECT_GT(ess, 20000.0 / 400.0);
  EXPECT_LT(ess, 20000.0 / 100.0);
}

TEST(Rng, SubstreamsAreDistinctAndReproducible) {
  EXPECT_NE(substream_seed(1, 0), substream_seed(1, 1));
  EXPECT_NE(substream_seed(1, 0), substream_seed(2, 0));
  Rng a(substream_seed(9, 4)), b(substream_seed(9, 4));
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a.next(), b.next());
}

TEST(Rng, BelowIsInRangeAndRoughlyUniform) {
  Rng rng(5);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto k = rng.below(7);
    ASSERT_LT(k, 7u);
    ++counts[k];
  }
  for (int c : counts) EXPECT_NEAR(c, 10000, 400);
}

}  // namespace
}  // namespace stablebip
