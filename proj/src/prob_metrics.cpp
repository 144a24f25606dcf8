#include "stablebip/prob_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "stablebip/error.hpp"

namespace stablebip {

void check_shared_reference(const WeightedPosterior& mu, const WeightedPosterior& nu) {
  if (!mu.draws || !nu.draws) throw ReferenceMismatchError("posterior without prior draws");
  if (mu.size() != nu.size() || mu.draws->size() != nu.draws->size() ||
      mu.size() != mu.draws->size()) {
    throw ReferenceMismatchError("posteriors are built on different prior draw lists");
  }
  if (mu.draws == nu.draws) return;
  for (std::size_t i = 0; i < mu.draws->size(); ++i) {
    if ((*mu.draws)[i].seed != (*nu.draws)[i].seed) {
      throw ReferenceMismatchError("posteriors are built on different prior draw lists");
    }
  }
}

namespace {

MetricEstimate clamp_unit(double raw, double se, std::size_t m) {
  const double v = std::clamp(raw, 0.0, 1.0);
  return {v, se, m, std::abs(raw - v)};
}

double influence_std_error(double sum_sq, double m) {
  return std::sqrt(sum_sq / (m * (m - 1.0)));
}

}  // namespace

MetricEstimate hellinger(const WeightedPosterior& mu, const WeightedPosterior& nu) {
  check_shared_reference(mu, nu);
  const std::size_t n = mu.size();
  const double m = static_cast<double>(n);
  double bc = 0.0;
  for (std::size_t i = 0; i < n; ++i) bc += std::sqrt(mu.weights[i] * nu.weights[i]);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double psi = m * (std::sqrt(mu.weights[i] * nu.weights[i]) -
                            0.5 * bc * (mu.weights[i] + nu.weights[i]));
    ss += psi * psi;
  }
  return clamp_unit(1.0 - bc, influence_std_error(ss, m), n);
}

double hellinger_root(double d_h) { return std::sqrt(std::max(d_h, 0.0)); }

MetricEstimate hellinger_l2(const WeightedPosterior& mu, const WeightedPosterior& nu) {
  const MetricEstimate h = hellinger(mu, nu);
  MetricEstimate out = h;
  out.value = std::sqrt(2.0 * h.value);
  // d/dx sqrt(2x) = 1 / sqrt(2x); fall back to the half-order bound at 0.
  out.std_error = out.value > 0.0 ? h.std_error / out.value : std::sqrt(2.0 * h.std_error);
  return out;
}

MetricEstimate total_variation(const WeightedPosterior& mu, const WeightedPosterior& nu) {
  check_shared_reference(mu, nu);
  const std::size_t n = mu.size();
  const double m = static_cast<double>(n);
  double tv = 0.0;
  double a = 0.0;
  double b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = mu.weights[i] - nu.weights[i];
    tv += std::abs(d);
    const double s = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
    a += s * mu.weights[i];
    b += s * nu.weights[i];
  }
  tv *= 0.5;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = mu.weights[i] - nu.weights[i];
    const double psi = (0.5 * m * std::abs(d) - tv) +
                       0.5 * (b * (m * nu.weights[i] - 1.0) - a * (m * mu.weights[i] - 1.0));
    ss += psi * psi;
  }
  return clamp_unit(tv, influence_std_error(ss, m), n);
}

QoiBoundCheck qoi_bound_check(const Qoi& f, const WeightedPosterior& mu,
                              const WeightedPosterior& nu) {
  check_shared_reference(mu, nu);
  const auto& draws = *mu.draws;
  const std::size_t n = draws.size();
  std::vector<double> fx(n);
  for (std::size_t i = 0; i < n; ++i) {
    fx[i] = f(draws[i]);
    if (!std::isfinite(fx[i])) throw DomainError("quantity of interest is not finite");
  }
  double e_mu = 0.0, e_nu = 0.0, sq_mu = 0.0, sq_nu = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    e_mu += mu.weights[i] * fx[i];
    e_nu += nu.weights[i] * fx[i];
    sq_mu += mu.weights[i] * fx[i] * fx[i];
    sq_nu += nu.weights[i] * fx[i] * fx[i];
  }
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double psi = mu.weights[i] * (fx[i] - e_mu) - nu.weights[i] * (fx[i] - e_nu);
    ss += psi * psi;
  }
  const double se_lhs = std::sqrt(ss);
  const MetricEstimate d = hellinger_l2(mu, nu);
  const double dh = hellinger(mu, nu).value;
  const double factor = std::numbers::sqrt2 * std::sqrt(sq_mu + sq_nu);

  QoiBoundCheck out;
  out.lhs = std::abs(e_mu - e_nu);
  out.rhs = factor * d.value;
  out.std_error = std::sqrt(se_lhs * se_lhs + factor * factor * d.std_error * d.std_error);
  out.holds = out.lhs <= out.rhs + 3.0 * out.std_error;
  out.rhs_squared_convention = factor * dh;
  return out;
}

}  // namespace stablebip
