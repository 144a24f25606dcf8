#ifndef STABLEBIP_STABLE_DIST_HPP_
#define STABLEBIP_STABLE_DIST_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "stablebip/rng.hpp"

namespace stablebip {

// Parameters of the univariate stable law S(alpha, beta, gamma, delta).
//
// Characteristic function (the "S1" convention):
//   alpha != 1: exp(i delta t - gamma^alpha |t|^alpha
//                   (1 - i beta sign(t) tan(pi alpha / 2)))
//   alpha == 1: exp(i delta t - gamma |t| (1 + i beta (2/pi) sign(t) log|t|))
// At alpha = 2 this is Normal(delta, 2 gamma^2); alpha = 1, beta = 0 is the
// Cauchy law with scale gamma; alpha = 1/2, beta = 1 is the Levy law.
struct StableParams {
  double alpha = 2.0;
  double beta = 0.0;
  double gamma = 1.0;
  double delta = 0.0;
};

// Throws DomainError unless 0 < alpha <= 2, |beta| <= 1, gamma >= 0, all
// finite.
void validate(const StableParams& params);

struct StabilityReport {
  int n_fold = 0;
  double shift_d = 0.0;
  double ks_statistic = 0.0;
  double ks_p_value = 0.0;
};

// One Chambers-Mallows-Stuck draw. `params` is assumed valid.
double sample_stable_one(const StableParams& params, Rng& rng);

// `count` i.i.d. draws. Draws are generated in fixed blocks, each from its own
// substream of `seed`, and the blocks are filled in parallel; output does not
// depend on the thread count.
std::vector<double> sample_stable(const StableParams& params,
                                  std::uint64_t seed, std::size_t count);

// Exact CDF for the Gaussian, Cauchy and Levy cases, nullopt otherwise.
std::optional<double> stable_cdf_closed_form(const StableParams& params,
                                             double x);

// Log density for the Gaussian (alpha = 2) and Cauchy (alpha = 1, beta = 0)
// cases, nullopt otherwise. Degenerate laws (gamma = 0) have no density.
std::optional<double> stable_log_density_closed_form(const StableParams& params,
                                                     double x);

// E|X|^p < infinity. Throws DomainError for p <= 0.
bool moment_finite(const StableParams& params, double p);

// Monte Carlo estimate of E|X|^p. Throws DivergingMomentError when the moment
// is infinite.
double fractional_moment_estimate(const StableParams& params, double p,
                                  std::uint64_t seed, std::size_t count);

// Running means of |X|^p over one stream of draws, reported at each of the
// increasing `checkpoints`. No finiteness precondition: this is the
// diagnostic for diverging moments.
std::vector<double> running_abs_moment(const StableParams& params, double p,
                                       std::uint64_t seed,
                                       std::span<const std::size_t> checkpoints);

// The d with X_1 + ... + X_n equal in law to n^(1/alpha) X + d, symmetric
// case only.
double stability_shift(const StableParams& params, int n_fold);

// Two-sample check of the stability law: sums of n_fold copies, shifted by d
// and rescaled by n_fold^(-1/alpha), against fresh draws of the base law.
// Requires beta == 0, n_fold >= 2, count >= 1000.
StabilityReport stability_property_test(const StableParams& params, int n_fold,
                                        std::size_t count, std::uint64_t seed);

// Block size of the parallel sampling kernels.
inline constexpr std::size_t kSampleBlock = 8192;

namespace reference {

// Serial versions of the parallel kernels above; kept as the test reference
// and benchmark baseline.
std::vector<double> sample_stable(const StableParams& params,
                                  std::uint64_t seed, std::size_t count);
double fractional_moment_estimate(const StableParams& params, double p,
                                  std::uint64_t seed, std::size_t count);

}  // namespace reference

}  // namespace stablebip

#endif  // STABLEBIP_STABLE_DIST_HPP_
