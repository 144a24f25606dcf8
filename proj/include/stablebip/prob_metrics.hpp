#ifndef STABLEBIP_PROB_METRICS_HPP_
#define STABLEBIP_PROB_METRICS_HPP_

#include <cstddef>
#include <functional>

#include "stablebip/posterior_core.hpp"

namespace stablebip {

struct MetricEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t sample_count = 0;
  // |raw - value| where raw is the estimate before clamping to [0, 1].
  double clamp_magnitude = 0.0;
};

// Hellinger distance in the convention d_H = 1 - BC, BC the Bhattacharyya
// coefficient (the squared Hellinger distance of other conventions). The two
// posteriors must share the same prior draws, which act as the reference
// measure. Standard error by the delta method.
MetricEstimate hellinger(const WeightedPosterior& mu, const WeightedPosterior& nu);

// sqrt(d_H): the Hellinger distance in the square-root convention.
double hellinger_root(double d_h);

// sqrt(int (sqrt(dmu/dr) - sqrt(dnu/dr))^2 dr) = sqrt(2 d_H), the L^2 distance
// between root densities. This is the distance under which the
// quantity-of-interest bound below holds.
MetricEstimate hellinger_l2(const WeightedPosterior& mu, const WeightedPosterior& nu);

// Total variation 1/2 E_r |dmu/dr - dnu/dr| on the shared reference.
MetricEstimate total_variation(const WeightedPosterior& mu, const WeightedPosterior& nu);

struct QoiBoundCheck {
  double lhs = 0.0;  // |E_mu f - E_nu f|
  double rhs = 0.0;  // sqrt(2) sqrt(E_mu f^2 + E_nu f^2) * hellinger_l2
  double std_error = 0.0;
  bool holds = false;
  // rhs with the squared-convention d_H in place of hellinger_l2.
  double rhs_squared_convention = 0.0;
};

using Qoi = std::function<double(const FunctionDraw&)>;

// lhs <= rhs + 3 * combined standard error.
QoiBoundCheck qoi_bound_check(const Qoi& f, const WeightedPosterior& mu,
                              const WeightedPosterior& nu);

// Throws ReferenceMismatchError unless both posteriors use the same draws.
void check_shared_reference(const WeightedPosterior& mu, const WeightedPosterior& nu);

}  // namespace stablebip

#endif  // STABLEBIP_PROB_METRICS_HPP_
