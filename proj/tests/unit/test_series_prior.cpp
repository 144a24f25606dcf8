#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "stablebip/error.hpp"
#include "stablebip/series_prior.hpp"
#include "test_support.hpp"

namespace stablebip {
namespace {

using Kind = SequenceForm::Kind;

ExpansionSpec spec_with(double alpha, double q, SequenceForm gamma, SequenceForm delta,
                        std::size_t n = 32) {
  return make_expansion(alpha, 0.0, gamma, delta, {BasisFamily::kFourier, n}, n, q);
}

TEST(ConvergenceGate, PowerTwoCauchyNeedsAndPassesTheLogCondition) {
  const auto v = validate_theorem1(spec_with(1.0, 1.0, {Kind::kPower, 1.0, 2.0}, {Kind::kPower, 0.0, 1.0}));
  EXPECT_TRUE(v.orlicz_required);
  ASSERT_TRUE(v.orlicz_finite.has_value());
  EXPECT_TRUE(*v.orlicz_finite);
  EXPECT_TRUE(v.overall);
  EXPECT_FALSE(v.truncation_level);
  // Partial sums of n^-2 * 2 log n settle (to about 1.8751).
  double partial = 0.0;
  for (int n = 1; n <= 100000; ++n) partial += std::pow(n, -2.0) * 2.0 * std::log(n);
  EXPECT_NEAR(partial, 2.0 * 0.9375482543, 1e-3);
}

TEST(ConvergenceGate, HarmonicScalesFail) {
  const auto v = validate_theorem1(spec_with(1.0, 1.0, {Kind::kPower, 1.0, 1.0}, {Kind::kPower, 0.0, 1.0}));
  EXPECT_FALSE(v.gamma_in_l_alpha);
  EXPECT_FALSE(v.overall);
}

TEST(ConvergenceGate, AlphaTwiceQRequiresTheLogCondition) {
  const auto v = validate_theorem1(spec_with(1.0, 0.5, {Kind::kPower, 1.0, 2.0}, {Kind::kPower, 0.0, 1.0}));
  EXPECT_TRUE(v.orlicz_required);
  const auto w = validate_theorem1(spec_with(1.0, 0.8, {Kind::kPower, 1.0, 2.0}, {Kind::kPower, 0.0, 1.0}));
  EXPECT_FALSE(w.orlicz_required);
  EXPECT_FALSE(w.orlicz_finite.has_value());
}

TEST(ConvergenceGate, OverallIsTheConjunction) {
  for (double gr : {0.5, 1.5, 3.0}) {
    for (double dr : {0.5, 3.0}) {
      for (double q : {0.6, 1.2, 2.4}) {
        const auto v = validate_theorem1(spec_with(1.2, q, {Kind::kPower, 1.0, gr}, {Kind::kPower, 1.0, dr}));
        const bool expected = v.gamma_in_l_alpha && v.delta_in_l_q &&
                              (!v.orlicz_required || v.orlicz_finite.value_or(false));
        EXPECT_EQ(v.overall, expected);
        EXPECT_EQ(v.gamma_in_l_alpha, gr * 1.2 > 1.0);
        EXPECT_EQ(v.delta_in_l_q, dr * q > 1.0);
        EXPECT_EQ(v.orlicz_required, q == 1.2 || q == 0.6);
      }
    }
  }
}

TEST(ConvergenceGate, RawVectorsAreJudgedAtTruncationLevel) {
  ExpansionSpec s = spec_with(1.0, 1.0, {Kind::kPower, 1.0, 1.0}, {Kind::kPower, 0.0, 1.0});
  s.gamma_form.reset();
  const auto v = validate_theorem1(s);
  EXPECT_TRUE(v.truncation_level);
  EXPECT_TRUE(v.overall);  // finite partial sums
}

TEST(ConvergenceGate, AlphaOutsideTheOpenIntervalThrows) {
  const auto s = testing::scalar_gaussian_prior(1.0);
  EXPECT_THROW(validate_theorem1(s), HypothesisError);
  EXPECT_TRUE(sampling_verdict(s).overall);
}

TEST(Validate, StructuralInvariants) {
  auto s = testing::cauchy_prior(8, BasisFamily::kCanonical);
  s.betas[2] = 1.0;
  EXPECT_THROW(validate(s), DomainError);
  s = testing::cauchy_prior(8, BasisFamily::kCanonical);
  s.gammas[1] = -1.0;
  EXPECT_THROW(validate(s), DomainError);
  s = testing::cauchy_prior(8, BasisFamily::kCanonical);
  s.truncation = 9;
  EXPECT_THROW(validate(s), ShapeError);
  s = testing::cauchy_prior(8, BasisFamily::kCanonical);
  s.alpha = 2.5;
  EXPECT_THROW(validate(s), DomainError);
}

TEST(DrawPrior, DegenerateSpecs) {
  const BasisSpec b{BasisFamily::kDifference, 16};
  const auto zero = make_expansion(1.0, 0.0, {Kind::kPower, 0.0, 1.0}, {Kind::kPower, 0.0, 1.0}, b, 16, 1.0);
  for (double v : draw_prior(zero, 5).grid_values) EXPECT_EQ(v, 0.0);
  const auto det = make_expansion(1.0, 0.0, {Kind::kPower, 0.0, 1.0}, {Kind::kPower, 1.0, 2.0}, b, 16, 1.0);
  const auto d = draw_prior(det, 5);
  EXPECT_EQ(d.grid_values, synthesis(SequenceForm{Kind::kPower, 1.0, 2.0}.first(16), b));
}

TEST(DrawPrior, DistinctSeedsGiveDistinctCoefficients) {
  const auto s = testing::cauchy_prior(16, BasisFamily::kFourier);
  std::set<std::vector<double>> seen;
  for (std::uint64_t k = 0; k < 200; ++k) seen.insert(draw_prior(s, 1000 + k).coefficients);
  EXPECT_EQ(seen.size(), 200u);
}

TEST(DrawPrior, GridValuesAreTheSynthesisAndSeedsReproduce) {
  const auto s = testing::cauchy_prior(32, BasisFamily::kHaar);
  const auto batch = draw_prior_batch(s, 77, 50);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    EXPECT_EQ(batch[i].grid_values, synthesis(batch[i].coefficients, s.basis));
    EXPECT_EQ(batch[i].seed, substream_seed(77, i));
    const auto again = draw_prior(s, batch[i].seed);
    EXPECT_EQ(again.coefficients, batch[i].coefficients);
  }
}

TEST(DrawPrior, GateRefusesWithoutOverride) {
  const auto bad = spec_with(1.0, 1.0, {Kind::kPower, 1.0, 1.0}, {Kind::kPower, 0.0, 1.0});
  EXPECT_THROW(draw_prior(bad, 1), HypothesisError);
  EXPECT_NO_THROW(draw_prior(bad, 1, true));
  // Orlicz corner alpha = q with a borderline-failing scale sequence.
  const auto corner = spec_with(1.0, 1.0, {Kind::kPower, 1.0, 0.9}, {Kind::kPower, 0.0, 1.0});
  EXPECT_THROW(draw_prior_batch(corner, 1, 4), HypothesisError);
}

TEST(EmpiricalLpNorm, ZeroAndBatchStability) {
  const BasisSpec b{BasisFamily::kFourier, 32};
  const auto zero = make_expansion(1.0, 0.0, {Kind::kPower, 0.0, 1.0}, {Kind::kPower, 0.0, 1.0}, b, 32, 1.0);
  EXPECT_EQ(empirical_lp_norm(zero, 0.5, 100, 1), 0.0);
  const auto s = testing::cauchy_prior(32, BasisFamily::kFourier);
  const double a = empirical_lp_norm(s, 0.5, 10000, 1);
  const double c = empirical_lp_norm(s, 0.5, 10000, 2);
  EXPECT_LT(std::abs(a - c) / std::max(a, c), 0.10);
}

TEST(EmpiricalLpNorm, DoublingScalesIncreasesTheEstimate) {
  const auto s = testing::cauchy_prior(32, BasisFamily::kFourier, 1.0);
  const auto s2 = testing::cauchy_prior(32, BasisFamily::kFourier, 2.0);
  const double a = empirical_lp_norm(s, 0.5, 5000, 3);
  const double b = empirical_lp_norm(s2, 0.5, 5000, 3);  // common random numbers
  EXPECT_GT(b, a);
  EXPECT_NEAR(b / a, std::sqrt(2.0), 1e-9);
}

TEST(EmpiricalLpNorm, OrderPreconditions) {
  const auto s = testing::cauchy_prior(8, BasisFamily::kFourier);
  EXPECT_THROW(empirical_lp_norm(s, 1.0, 10, 1), DivergingMomentError);
  EXPECT_THROW(empirical_lp_norm(s, 1.5, 10, 1), DivergingMomentError);
  EXPECT_THROW(empirical_lp_norm(s, 0.0, 10, 1), DomainError);
  auto loose = s;
  loose.q = 0.5;
  EXPECT_THROW(empirical_lp_norm(loose, 0.75, 10, 1), DomainError);
}

TEST(RunningNormMoment, HeavyTailSignatureAboveAlpha) {
  const auto s = testing::cauchy_prior(16, BasisFamily::kFourier);
  const std::vector<std::size_t> cp = {100, 1000, 10000, 100000};
  const auto r = running_norm_moment(s, 1.2, 9, cp);
  EXPECT_GT(r.back(), r.front());
  const auto calm = running_norm_moment(s, 0.5, 9, cp);
  EXPECT_NEAR(calm[2] / calm[3], 1.0, 0.05);
}

TEST(TailDecay, Examples) {
  const auto s = testing::cauchy_prior(64, BasisFamily::kFourier);
  const std::vector<std::size_t> cp = {4, 32};
  const auto t = tail_decay_profile(s, cp, 1000, 5);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_LT(t[1].mean_tail, t[0].mean_tail);

  const BasisSpec b{BasisFamily::kFourier, 16};
  const auto zero = make_expansion(1.0, 0.0, {Kind::kPower, 0.0, 1.0}, {Kind::kPower, 0.0, 1.0}, b, 16, 1.0);
  for (const auto& p : tail_decay_profile(zero, std::vector<std::size_t>{1, 8}, 50, 1)) EXPECT_EQ(p.mean_tail, 0.0);

  auto one = zero;
  one.gammas[0] = 1.0;
  one.gamma_form.reset();
  for (const auto& p : tail_decay_profile(one, std::vector<std::size_t>{1, 5, 16}, 50, 1)) {
    EXPECT_EQ(p.mean_tail, 0.0);
  }
}

}  // namespace
}  // namespace stablebip
