#ifndef STABLEBIP_STATS_HPP_
#define STABLEBIP_STATS_HPP_

#include <functional>
#include <span>
#include <vector>

namespace stablebip::stats {

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Survival function of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_survival(double lambda);

// One-sample Kolmogorov-Smirnov test against a continuous CDF. The p-value
// uses the asymptotic law with Stephens' finite-sample correction.
KsResult ks_one_sample(std::span<const double> samples,
                       const std::function<double(double)>& cdf);

// Two-sample Kolmogorov-Smirnov test.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

// Sample mean with the standard error sd / sqrt(n); zero error for n == 1.
MeanEstimate mean_with_error(std::span<const double> x);

// Empirical quantile with linear interpolation between order statistics
// (position prob * (n - 1) in the sorted sample). `sorted` must be sorted.
double quantile_sorted(std::span<const double> sorted, double prob);
double quantile(std::vector<double> x, double prob);

// Self-normalised weighted mean and variance with delta-method standard
// errors. Weights must sum to one.
struct WeightedMoments {
  double mean = 0.0;
  double mean_std_error = 0.0;
  double variance = 0.0;
  double variance_std_error = 0.0;
};
WeightedMoments weighted_moments(std::span<const double> weights,
                                 std::span<const double> x);

// Effective sample size of a correlated series, n / tau with tau from Geyer's
// initial positive sequence. Clamped to [1, n].
double effective_sample_size(std::span<const double> series);

}  // namespace stablebip::stats

#endif  // STABLEBIP_STATS_HPP_
