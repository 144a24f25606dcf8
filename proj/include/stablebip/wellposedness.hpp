#ifndef STABLEBIP_WELLPOSEDNESS_HPP_
#define STABLEBIP_WELLPOSEDNESS_HPP_

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <ostream>
#include <span>
#include <vector>

#include "stablebip/inference.hpp"
#include "stablebip/posterior_core.hpp"
#include "stablebip/series_prior.hpp"

namespace stablebip {

struct ConjugateSolution {
  Eigen::VectorXd posterior_mean;
  Eigen::MatrixXd posterior_covariance;
};

// Exact linear-Gaussian posterior for y = G u + N(0, noise) and u ~ N(m0, C),
// in the gain form C - C G^T S^{-1} G C with S = G C G^T + noise; G = 0
// returns the prior unchanged.
ConjugateSolution conjugate_posterior_oracle(const Eigen::MatrixXd& G,
                                             const Eigen::VectorXd& prior_mean,
                                             const Eigen::MatrixXd& prior_cov,
                                             const NoiseModel& noise,
                                             const Eigen::VectorXd& y);

// log E_prior[exp(-Phi(u; y))] for the whitened least-squares Phi.
double conjugate_log_evidence(const Eigen::MatrixXd& G, const Eigen::VectorXd& prior_mean,
                              const Eigen::MatrixXd& prior_cov, const NoiseModel& noise,
                              const Eigen::VectorXd& y);

// 1 - BC between two Gaussians (same convention as `hellinger`).
double gaussian_hellinger(const Eigen::VectorXd& m1, const Eigen::MatrixXd& c1,
                          const Eigen::VectorXd& m2, const Eigen::MatrixXd& c2);

// Gaussian prior moments of the coefficients of an alpha = 2 expansion:
// mean delta_n, variance 2 gamma_n^2.
void gaussian_prior_moments(const ExpansionSpec& spec, Eigen::VectorXd& mean,
                            Eigen::MatrixXd& cov);

// Dense synthesis matrix (grid_size x truncation).
Eigen::MatrixXd synthesis_matrix(const BasisSpec& basis, std::size_t truncation);

struct LipschitzScan {
  std::vector<double> base_data;
  std::vector<std::vector<double>> perturbed_data;
  std::vector<double> steps;
  std::vector<std::size_t> direction_index;
  std::vector<double> distances;
  std::vector<double> hellinger_values;
  std::vector<double> std_errors;
  std::vector<double> ratios;
  double sup_ratio = 0.0;
  double radius_r = 0.0;
  // Monte Carlo mean of exp(2 M2(r, ||u||) - M1(r, ||u||)) over the draws
  // and the same mean on the first half; wildly different values flag a
  // heavy-tailed, possibly non-integrable, bound.
  double integrability_mean = 0.0;
  double integrability_half_mean = 0.0;
};

// Posteriors for y0 and each y0 + step * direction on the shared draws.
// Zero-distance perturbations are skipped. Cells run in parallel.
LipschitzScan hellinger_lipschitz_scan(std::shared_ptr<const PriorDraws> draws,
                                       const Potential& potential,
                                       std::span<const double> y0,
                                       const std::vector<std::vector<double>>& directions,
                                       std::span<const double> step_sizes, double r);

// Columns: step, distance, d_H, std_error, ratio.
void write_scan_csv(std::ostream& out, const LipschitzScan& scan);

struct DiscretisedProblem {
  ExpansionSpec prior;
  ForwardModel model;
  NoiseModel noise;
};

using ModelFamily = std::function<DiscretisedProblem(std::size_t n)>;

enum class SummaryMethod { kConjugate, kMcmc, kImportance };

SummaryMethod summary_method_from_string(const std::string& name);
std::string to_string(SummaryMethod method);

struct InvarianceOptions {
  SummaryMethod method = SummaryMethod::kConjugate;
  // Physical evaluation points in [0, 1), read by linear interpolation
  // between the neighbouring cell centres (i + 1/2) / n.
  std::vector<double> eval_points;
  // mcmc: per-chain configuration in sweeps (one sweep = n single moves for
  // coefficient_rw, one move otherwise) and the number of chains. At most
  // 10000 states per chain enter the median, spaced by whole sweeps.
  std::size_t sweeps = 1000;
  double burn_in_fraction = 0.25;
  Proposal proposal = Proposal::kCoefficientRw;
  double rw_scale = 1.0;
  std::size_t chains = 1;
  // importance: number of prior draws.
  std::size_t draws = 10000;
};

struct InvarianceRow {
  std::size_t n = 0;
  std::vector<double> median;  // posterior median at the evaluation points
  double drift = 0.0;          // relative L2 change from the previous row; 0 for the first
};

// Runs the posterior pipeline at every grid size with the same data vector y
// and seed, and tabulates the pointwise posterior median.
std::vector<InvarianceRow> discretisation_invariance_study(const ModelFamily& family,
                                                           std::span<const std::size_t> sizes,
                                                           std::span<const double> y,
                                                           const InvarianceOptions& options,
                                                           std::uint64_t seed);

// ||a - b|| / ||a||, with a the reference (coarser) summary.
double relative_l2_drift(std::span<const double> a, std::span<const double> b);

// Smallest value whose cumulative normalised weight reaches prob.
double weighted_quantile(std::span<const double> values, std::span<const double> weights,
                         double prob);

// Columns: n, drift, then m<k> for each evaluation point.
void write_invariance_csv(std::ostream& out, const std::vector<InvarianceRow>& rows);

}  // namespace stablebip

#endif  // STABLEBIP_WELLPOSEDNESS_HPP_
