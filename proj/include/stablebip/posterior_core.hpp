#ifndef STABLEBIP_POSTERIOR_CORE_HPP_
#define STABLEBIP_POSTERIOR_CORE_HPP_

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "stablebip/series_prior.hpp"

namespace stablebip {

// Linear forward map G from grid functions to data vectors.
struct ForwardModel {
  Eigen::MatrixXd op;  // n_obs x grid_size
  std::string description;

  std::size_t n_obs() const { return static_cast<std::size_t>(op.rows()); }
  std::size_t grid_size() const { return static_cast<std::size_t>(op.cols()); }
  std::vector<double> apply(std::span<const double> u) const;
};

void validate(const ForwardModel& model);

// Additive Gaussian noise N(0, covariance). Construction checks symmetry and
// factorises; a failed Cholesky throws FactorizationError.
class NoiseModel {
 public:
  explicit NoiseModel(Eigen::MatrixXd covariance);

  static NoiseModel isotropic(std::size_t dim, double sigma);

  const Eigen::MatrixXd& covariance() const { return covariance_; }
  std::size_t dim() const { return static_cast<std::size_t>(covariance_.rows()); }

  // L^{-1} x with covariance = L L^T; ||L^{-1} x|| = ||covariance^{-1/2} x||.
  Eigen::VectorXd whiten(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd whiten(const Eigen::MatrixXd& x) const;

  // Spectral norm of covariance^{-1/2}.
  double inverse_sqrt_norm() const { return inverse_sqrt_norm_; }

 private:
  Eigen::MatrixXd covariance_;
  Eigen::MatrixXd cholesky_lower_;
  double inverse_sqrt_norm_ = 0.0;
};

// Misfit Phi(u; y) with declared bound families:
//   Phi(u; y) >= bound_m1(r, ||u||)                        for ||y|| < r
//   |Phi(u; y) - Phi(u; y')| <= exp(bound_m2(r, ||u||)) ||y - y'||
// where ||u|| is the grid sup norm and ||y|| the Euclidean norm.
struct Potential {
  std::function<double(std::span<const double> u, std::span<const double> y)> evaluate;
  std::function<double(double r, double s)> bound_m1;
  std::function<double(double r, double s)> bound_m2;
  std::string description;
};

// Phi = 1/2 ||covariance^{-1/2} (G u - y)||^2 via the Cholesky factor.
// bound_m1 = 0; bound_m2(r, s) = log(c1 s + c2 r) with c1 = ||W|| ||W G||_{sup->2},
// c2 = ||W||^2 and W = covariance^{-1/2}.
Potential gaussian_potential(const ForwardModel& model, const NoiseModel& noise);

// Phi = c for every (u, y).
Potential constant_potential(double c);

// Phi(u, y) = value(u), independent of the data. bound_m1 is -inf.
Potential fixed_potential(std::function<double(std::span<const double>)> value);

struct ZEstimate {
  double z = 0.0;
  double std_error = 0.0;
  double log_z = 0.0;
};

// Sample mean and standard error of exp(-Phi(u_i; y)) over prior draws.
ZEstimate estimate_z(const PriorDraws& draws, const Potential& potential,
                     std::span<const double> y);

// Self-normalised importance weights w_i proportional to exp(-Phi(u_i; y))
// on a shared set of prior draws. Immutable once built.
struct WeightedPosterior {
  std::shared_ptr<const PriorDraws> draws;
  std::vector<double> phi;
  std::vector<double> log_weights;
  std::vector<double> weights;
  ZEstimate z;
  double ess = 0.0;
  std::vector<double> data;

  std::size_t size() const { return weights.size(); }
};

// Log-weights shifted by their maximum; shifted values below this are set to
// exactly zero weight.
inline constexpr double kLogWeightFloor = -700.0;

WeightedPosterior build_posterior(std::shared_ptr<const PriorDraws> draws,
                                  const Potential& potential, std::span<const double> y);

// Phi(u_i; y) for every draw, in parallel.
std::vector<double> evaluate_potential(const PriorDraws& draws, const Potential& potential,
                                       std::span<const double> y);

struct BoundViolation {
  enum class Kind { kLowerBound, kLipschitz };
  Kind kind = Kind::kLowerBound;
  std::size_t draw = 0;
  std::size_t y_index = 0;
  std::size_t y_other = 0;
  double value = 0.0;  // Phi or |Phi - Phi'|
  double bound = 0.0;
};

struct BoundsReport {
  std::vector<BoundViolation> violations;
  std::size_t checks = 0;

  bool passed() const { return violations.empty(); }
};

// Checks both declared bounds on every draw and every data vector (pair).
// Throws RadiusError when some ||y|| >= r.
BoundsReport verify_bounds(const Potential& potential, const PriorDraws& draws,
                           const std::vector<std::vector<double>>& y_set, double r);

double euclidean_norm(std::span<const double> v);

namespace reference {

std::vector<double> evaluate_potential(const PriorDraws& draws, const Potential& potential,
                                       std::span<const double> y);

}  // namespace reference

}  // namespace stablebip

#endif  // STABLEBIP_POSTERIOR_CORE_HPP_
