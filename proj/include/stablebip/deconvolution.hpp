#ifndef STABLEBIP_DECONVOLUTION_HPP_
#define STABLEBIP_DECONVOLUTION_HPP_

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "stablebip/wellposedness.hpp"

namespace stablebip {

// One-dimensional deblurring on [0, 1): the unknown is piecewise constant on
// n cells, observed through a Gaussian blur (physical std kernel_width) at
// fixed points x_j = (j + 1/2) / observations, plus N(0, noise_sigma^2) noise.
// The prior puts independent stable laws on the increments (difference
// basis).
struct DeconvolutionSpec {
  std::size_t observations = 16;
  double kernel_width = 3.0 / 64.0;
  double noise_sigma = 0.01;
  double alpha = 1.0;

  // power:     gamma_k = gamma_scale * k^(-gamma_rate), k = 1..n
  // increment: gamma_1 = level_scale and gamma_k = gamma_scale * n^(-1/alpha)
  //            for k >= 2, the increments of a stable random walk
  enum class ScaleRule { kPower, kIncrement };
  ScaleRule scale_rule = ScaleRule::kPower;
  double gamma_scale = 0.1;
  double gamma_rate = 2.0;
  double level_scale = 0.1;
};

DeconvolutionSpec::ScaleRule scale_rule_from_string(const std::string& name);
std::string to_string(DeconvolutionSpec::ScaleRule rule);

void validate(const DeconvolutionSpec& spec);

std::vector<double> observation_points(std::size_t observations);

// G(j, i) = integral over cell i of the blur kernel centred at x_j. A zero
// width gives point evaluation. Throws GeometryError when the kernel is wider
// than the domain or there are more observations than cells.
Eigen::MatrixXd deconvolution_operator(std::size_t n, std::size_t observations,
                                       double kernel_width);

DiscretisedProblem make_deconvolution_family(std::size_t n, const DeconvolutionSpec& spec);

// A jump of `height` at position `at`: the signal is the sum of height * 1[x >= at].
struct Jump {
  double at = 0.0;
  double height = 0.0;
};

// Exact blurred observations of a step signal restricted to [0, 1), plus
// noise drawn from noise_seed (no noise when noise_sigma is zero).
std::vector<double> step_signal_data(const std::vector<Jump>& jumps, std::size_t observations,
                                     double kernel_width, double noise_sigma,
                                     std::uint64_t noise_seed);

}  // namespace stablebip

#endif  // STABLEBIP_DECONVOLUTION_HPP_
