#ifndef STABLEBIP_EXPERIMENT_HPP_
#define STABLEBIP_EXPERIMENT_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stablebip/deconvolution.hpp"
#include "stablebip/error.hpp"
#include "stablebip/series_prior.hpp"
#include "stablebip/stable_dist.hpp"

namespace stablebip {

// Malformed configuration text or a field of the wrong type; exit status 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {
      "sample-stable", "sample-prior", "posterior", "hellinger",
      "lipschitz-scan", "invariance", "map", "mcmc"};
  return names;
}

// gamma or delta sequence of the prior.
//   power / exponential: SequenceForm(scale, rate)
//   increment:           first term `level`, then scale * n^(-1/alpha)
//   values:              explicit leading terms
struct SequenceConfig {
  std::string kind = "power";
  double scale = 0.0;
  double rate = 1.0;
  double level = 0.0;
  std::vector<double> values;
};

struct PriorConfig {
  double alpha = 1.0;
  double beta = 0.0;
  std::string basis = "difference";
  std::size_t grid_size = 64;
  std::size_t truncation = 0;  // 0: the whole basis
  double q = 1.0;
  SequenceConfig gamma{"power", 0.1, 2.0, 0.0, {}};
  SequenceConfig delta{"power", 0.0, 1.0, 0.0, {}};
};

struct ModelConfig {
  std::string kind = "deconvolution";  // or "matrix"
  std::size_t observations = 16;
  double kernel_width = 3.0 / 64.0;
  double noise_sigma = 0.01;
  std::vector<Jump> truth = {{0.0, 0.05}, {0.25, 0.1}, {0.75, -0.08}};
  std::uint64_t noise_seed = 999;
  std::vector<double> data;                 // overrides truth when present
  std::vector<std::vector<double>> matrix;  // kind = matrix
};

struct StableConfig {
  StableParams params{1.0, 0.0, 1.0, 0.0};
  std::size_t count = 10000;
};

struct MonteCarloConfig {
  std::size_t draws = 10000;
  std::string potential = "gaussian";  // or "zero"
};

struct HellingerConfig {
  std::vector<double> direction;  // default: unit vector along (1, ..., 1)
  double step = 0.1;
};

struct ScanConfig {
  std::vector<double> steps = {0.4, 0.2, 0.1, 0.05};
  std::vector<std::vector<double>> directions;  // default: one unit vector along (1, ..., 1)
  double radius = 0.0;                          // 0: ||y0|| + max step + 1
};

struct InvarianceConfig {
  std::vector<std::size_t> sizes = {16, 32, 64, 128};
  std::string method = "mcmc";
  std::vector<double> eval_points;  // default: (j + 1/2) / 16
  std::size_t sweeps = 2000;
  std::size_t chains = 4;
  std::string proposal = "coefficient_rw";
  double rw_scale = 1.0;
  double burn_in_fraction = 0.25;
  std::size_t draws = 10000;
};

struct MapConfig {
  std::string regulariser = "one_norm";
  double weight = 1.0;
  double tol = 1e-10;
};

struct ChainOptions {
  std::size_t steps = 640000;
  std::size_t burn_in = 160000;
  std::string proposal = "coefficient_rw";
  double rw_scale = 1.0;
  std::size_t thin = 64;
  std::size_t chains = 4;
  std::vector<double> quantiles = {0.05, 0.5, 0.95};
};

struct ExperimentConfig {
  std::string experiment;  // empty until a subcommand or the config names one
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  StableConfig stable;
  PriorConfig prior;
  ModelConfig model;
  MonteCarloConfig monte_carlo;
  HellingerConfig hellinger;
  ScanConfig scan;
  InvarianceConfig invariance;
  MapConfig map;
  ChainOptions chain;
};

// Parses a JSON document. Unknown keys, wrong types and malformed text throw
// ConfigError naming the line or the field path.
ExperimentConfig parse_config(const std::string& text);

// Fully resolved configuration as JSON text; parse_config of the result gives
// back an equal configuration.
std::string config_to_json(const ExperimentConfig& config);

// Prior at grid size n (grid_size is ignored).
ExpansionSpec build_prior(const PriorConfig& prior, std::size_t n);

struct RunResult {
  std::vector<std::string> files;  // relative to the output directory, manifest last
};

// Validates every block the experiment uses, runs it and writes the
// artifacts plus manifest.json into config.output_dir.
RunResult run_experiment(const ExperimentConfig& config);

// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

// Exit status for an exception escaping run_experiment or parse_config:
// 2 config, 3 validation, 4 numerical, 1 anything else.
int exit_code_for(const std::exception& e);

}  // namespace stablebip

#endif  // STABLEBIP_EXPERIMENT_HPP_
