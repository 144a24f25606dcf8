#ifndef STABLEBIP_INFERENCE_HPP_
#define STABLEBIP_INFERENCE_HPP_

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "stablebip/posterior_core.hpp"
#include "stablebip/series_prior.hpp"

namespace stablebip {

enum class RegulariserKind { kQuadratic, kOneNorm, kNone };

// R(v) = weight/2 ||v||_2^2 (quadratic), weight ||v||_1 (one_norm), or 0.
struct Regulariser {
  RegulariserKind kind = RegulariserKind::kNone;
  double weight = 0.0;

  double value(std::span<const double> v) const;
};

RegulariserKind regulariser_kind_from_string(const std::string& name);

struct MapResult {
  std::vector<double> coefficients;
  double objective = 0.0;
  std::size_t sweeps = 0;
  std::vector<double> objective_history;  // after each sweep, starting at init
};

inline constexpr std::size_t kMaxMapSweeps = 10000;

// Minimises v -> Phi(synthesis(v); y) + R(v) by cyclic coordinate descent with
// a golden-section line search on each coordinate. Stops once a sweep lowers
// the objective by less than tol; throws IterationLimitError (carrying the best
// iterate) after kMaxMapSweeps sweeps.
MapResult map_estimate(const Potential& potential, const Regulariser& reg,
                       std::span<const double> y, std::span<const double> init,
                       const BasisSpec& basis, double tol);

enum class Proposal { kIndependencePrior, kCoefficientRw };

Proposal proposal_from_string(const std::string& name);
std::string to_string(Proposal proposal);

struct ChainConfig {
  std::size_t steps = 1000;
  std::size_t burn_in = 0;
  Proposal proposal = Proposal::kIndependencePrior;
  double rw_scale = 1.0;
  std::uint64_t seed = 0;
  // Keep every thin-th post-burn-in state.
  std::size_t thin = 1;
};

void validate(const ChainConfig& config);

struct ChainResult {
  std::vector<std::vector<double>> states;
  std::size_t accepted = 0;
  double acceptance_rate = 0.0;  // accepted / (steps - burn_in)
  std::vector<double> ess_per_coordinate;
};

// Metropolis-Hastings targeting exp(-Phi(u; y)) times the prior density of the
// coefficients.
//   independence_prior: propose a fresh prior draw; accept with
//     min(1, exp(Phi(current) - Phi(proposed))).
//   coefficient_rw: move one uniformly chosen coordinate by a symmetric
//     stable increment of scale rw_scale * gamma_n; the prior density ratio
//     enters the acceptance. Needs closed-form coefficient densities
//     (Cauchy or Gaussian).
// An acceptance probability of exactly one always accepts.
ChainResult mh_sample(const ExpansionSpec& prior, const Potential& potential,
                      std::span<const double> y, const ChainConfig& config);

// Independent chains on substreams of config.seed, run in parallel.
std::vector<ChainResult> run_chains(const ExpansionSpec& prior, const Potential& potential,
                                    std::span<const double> y, const ChainConfig& config,
                                    std::size_t chains);

// Per-grid-point empirical quantiles of the synthesised states.
struct QuantileTable {
  std::vector<double> quantiles;
  std::vector<std::vector<double>> values;  // values[q][grid point]
};

QuantileTable chain_summary(std::span<const std::vector<double>> states,
                            const BasisSpec& basis, std::span<const double> quantiles);
QuantileTable chain_summary(const ChainResult& result, const BasisSpec& basis,
                            std::span<const double> quantiles);

// CSV with a header "state,c0,c1,...", one row per stored state.
void write_chain_csv(std::ostream& out, const ChainResult& result);
// CSV with a header "grid_index,q<p>...", one row per grid point.
void write_quantile_csv(std::ostream& out, const QuantileTable& table);

}  // namespace stablebip

#endif  // STABLEBIP_INFERENCE_HPP_
