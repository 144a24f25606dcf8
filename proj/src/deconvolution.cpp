#include "stablebip/deconvolution.hpp"

#include <cmath>
#include <numbers>

#include "stablebip/error.hpp"
#include "stablebip/rng.hpp"

namespace stablebip {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

// Mass of the blur kernel centred at x over [a, b).
double kernel_mass(double x, double a, double b, double width) {
  if (width == 0.0) return (x >= a && x < b) ? 1.0 : 0.0;
  return normal_cdf((x - a) / width) - normal_cdf((x - b) / width);
}

}  // namespace

DeconvolutionSpec::ScaleRule scale_rule_from_string(const std::string& name) {
  if (name == "power") return DeconvolutionSpec::ScaleRule::kPower;
  if (name == "increment") return DeconvolutionSpec::ScaleRule::kIncrement;
  throw DomainError("unknown scale rule '" + name + "'");
}

std::string to_string(DeconvolutionSpec::ScaleRule rule) {
  return rule == DeconvolutionSpec::ScaleRule::kPower ? "power" : "increment";
}

void validate(const DeconvolutionSpec& spec) {
  if (spec.observations == 0) throw DomainError("need at least one observation");
  if (!(spec.kernel_width >= 0.0) || !std::isfinite(spec.kernel_width)) {
    throw DomainError("kernel width must be finite and >= 0");
  }
  if (spec.kernel_width > 1.0) throw GeometryError("kernel is wider than the unit domain");
  if (!(spec.noise_sigma > 0.0)) throw DomainError("noise sigma must be > 0");
  if (!(spec.alpha > 0.0 && spec.alpha <= 2.0)) throw DomainError("alpha must lie in (0, 2]");
  if (!(spec.gamma_scale > 0.0) || !(spec.level_scale > 0.0)) {
    throw DomainError("prior scales must be > 0");
  }
  if (!std::isfinite(spec.gamma_rate)) throw DomainError("gamma rate must be finite");
}

std::vector<double> observation_points(std::size_t observations) {
  std::vector<double> x(observations);
  for (std::size_t j = 0; j < observations; ++j) {
    x[j] = (static_cast<double>(j) + 0.5) / static_cast<double>(observations);
  }
  return x;
}

Eigen::MatrixXd deconvolution_operator(std::size_t n, std::size_t observations,
                                       double kernel_width) {
  if (n == 0 || observations == 0) throw DomainError("grid and observation counts must be >= 1");
  if (observations > n) throw GeometryError("more observations than grid cells");
  if (kernel_width > 1.0) throw GeometryError("kernel is wider than the unit domain");
  if (!(kernel_width >= 0.0)) throw DomainError("kernel width must be >= 0");
  const auto x = observation_points(observations);
  const double nn = static_cast<double>(n);
  Eigen::MatrixXd g(static_cast<Eigen::Index>(observations), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < observations; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      g(j, i) = kernel_mass(x[j], static_cast<double>(i) / nn, static_cast<double>(i + 1) / nn,
                            kernel_width);
    }
  }
  return g;
}

DiscretisedProblem make_deconvolution_family(std::size_t n, const DeconvolutionSpec& spec) {
  validate(spec);
  const BasisSpec basis{BasisFamily::kDifference, n};
  const SequenceForm zero{SequenceForm::Kind::kPower, 0.0, 1.0};
  ExpansionSpec prior;
  if (spec.scale_rule == DeconvolutionSpec::ScaleRule::kPower) {
    const SequenceForm gamma{SequenceForm::Kind::kPower, spec.gamma_scale, spec.gamma_rate};
    prior = make_expansion(spec.alpha, 0.0, gamma, zero, basis, n, 1.0);
  } else {
    prior = make_expansion(spec.alpha, 0.0, zero, zero, basis, n, 1.0);
    prior.gamma_form.reset();
    const double step = spec.gamma_scale * std::pow(static_cast<double>(n), -1.0 / spec.alpha);
    prior.gammas.assign(n, step);
    prior.gammas[0] = spec.level_scale;
  }
  ForwardModel model{deconvolution_operator(n, spec.observations, spec.kernel_width),
                     "gaussian blur, width " + std::to_string(spec.kernel_width)};
  return {std::move(prior), std::move(model),
          NoiseModel::isotropic(spec.observations, spec.noise_sigma)};
}

std::vector<double> step_signal_data(const std::vector<Jump>& jumps, std::size_t observations,
                                     double kernel_width, double noise_sigma,
                                     std::uint64_t noise_seed) {
  if (!(noise_sigma >= 0.0)) throw DomainError("noise sigma must be >= 0");
  if (kernel_width > 1.0) throw GeometryError("kernel is wider than the unit domain");
  const auto x = observation_points(observations);
  std::vector<double> y(observations, 0.0);
  for (const Jump& jump : jumps) {
    if (!(jump.at >= 0.0 && jump.at < 1.0)) throw DomainError("jump position must lie in [0, 1)");
    for (std::size_t j = 0; j < observations; ++j) {
      y[j] += jump.height * kernel_mass(x[j], jump.at, 1.0, kernel_width);
    }
  }
  if (noise_sigma > 0.0) {
    Rng rng(noise_seed);
    for (double& v : y) v += noise_sigma * rng.normal();
  }
  return y;
}

}  // namespace stablebip
