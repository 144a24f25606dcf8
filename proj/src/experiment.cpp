#include "stablebip/experiment.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <utility>

#include "stablebip/csv.hpp"
#include "stablebip/inference.hpp"
#include "stablebip/posterior_core.hpp"
#include "stablebip/prob_metrics.hpp"
#include "stablebip/wellposedness.hpp"

namespace stablebip {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------- parsing

class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  // Call after all fields were read; rejects unknown keys.
  void finish() const {
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.contains(key)) throw ConfigError("unknown field '" + field(key) + "'");
    }
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return node_.contains(key);
  }

  const json& at(const std::string& key) const { return node_.at(key); }
  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void read(const std::string& key, double& out) {
    if (has(key)) out = as_double(at(key), field(key));
  }
  void read(const std::string& key, std::uint64_t& out) {
    if (has(key)) out = as_u64(at(key), field(key));
  }
  void read(const std::string& key, std::string& out) {
    if (!has(key)) return;
    if (!at(key).is_string()) throw ConfigError(field(key) + ": expected a string");
    out = at(key).get<std::string>();
  }
  void read(const std::string& key, std::vector<double>& out) {
    if (has(key)) out = as_doubles(at(key), field(key));
  }
  void read(const std::string& key, std::vector<std::size_t>& out) {
    if (!has(key)) return;
    const json& a = at(key);
    if (!a.is_array()) throw ConfigError(field(key) + ": expected an array");
    out.clear();
    for (std::size_t i = 0; i < a.size(); ++i) {
      out.push_back(static_cast<std::size_t>(
          as_u64(a[i], field(key) + "[" + std::to_string(i) + "]")));
    }
  }
  void read(const std::string& key, std::vector<std::vector<double>>& out) {
    if (!has(key)) return;
    const json& a = at(key);
    if (!a.is_array()) throw ConfigError(field(key) + ": expected an array of arrays");
    out.clear();
    for (std::size_t i = 0; i < a.size(); ++i) {
      out.push_back(as_doubles(a[i], field(key) + "[" + std::to_string(i) + "]"));
    }
  }

  static double as_double(const json& v, const std::string& name) {
    if (!v.is_number()) throw ConfigError(name + ": expected a number");
    return v.get<double>();
  }
  static std::uint64_t as_u64(const json& v, const std::string& name) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer()) {
      throw ConfigError(name + ": expected a non-negative integer");
    }
    throw ConfigError(name + ": expected an integer");
  }
  static std::vector<double> as_doubles(const json& v, const std::string& name) {
    if (!v.is_array()) throw ConfigError(name + ": expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(as_double(v[i], name + "[" + std::to_string(i) + "]"));
    }
    return out;
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }

  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_sequence(Reader& parent, const std::string& key, SequenceConfig& seq) {
  if (!parent.has(key)) return;
  Reader r(parent.at(key), parent.field(key));
  r.read("kind", seq.kind);
  r.read("scale", seq.scale);
  r.read("rate", seq.rate);
  r.read("level", seq.level);
  r.read("values", seq.values);
  r.finish();
}

void read_prior(Reader& root, PriorConfig& p) {
  if (!root.has("prior")) return;
  Reader r(root.at("prior"), "prior");
  r.read("alpha", p.alpha);
  r.read("beta", p.beta);
  r.read("basis", p.basis);
  r.read("grid_size", p.grid_size);
  r.read("truncation", p.truncation);
  r.read("q", p.q);
  read_sequence(r, "gamma", p.gamma);
  read_sequence(r, "delta", p.delta);
  r.finish();
}

void read_model(Reader& root, ModelConfig& m) {
  if (!root.has("model")) return;
  Reader r(root.at("model"), "model");
  r.read("kind", m.kind);
  r.read("observations", m.observations);
  r.read("kernel_width", m.kernel_width);
  r.read("noise_sigma", m.noise_sigma);
  r.read("noise_seed", m.noise_seed);
  r.read("data", m.data);
  r.read("matrix", m.matrix);
  if (r.has("truth")) {
    const json& a = r.at("truth");
    if (!a.is_array()) throw ConfigError("model.truth: expected an array of jumps");
    m.truth.clear();
    for (std::size_t i = 0; i < a.size(); ++i) {
      Reader jr(a[i], "model.truth[" + std::to_string(i) + "]");
      Jump jump;
      jr.read("at", jump.at);
      jr.read("height", jump.height);
      jr.finish();
      m.truth.push_back(jump);
    }
  }
  r.finish();
}

void read_blocks(Reader& root, ExperimentConfig& c) {
  if (root.has("stable")) {
    Reader r(root.at("stable"), "stable");
    r.read("alpha", c.stable.params.alpha);
    r.read("beta", c.stable.params.beta);
    r.read("gamma", c.stable.params.gamma);
    r.read("delta", c.stable.params.delta);
    r.read("count", c.stable.count);
    r.finish();
  }
  read_prior(root, c.prior);
  read_model(root, c.model);
  if (root.has("monte_carlo")) {
    Reader r(root.at("monte_carlo"), "monte_carlo");
    r.read("draws", c.monte_carlo.draws);
    r.read("potential", c.monte_carlo.potential);
    r.finish();
  }
  if (root.has("hellinger")) {
    Reader r(root.at("hellinger"), "hellinger");
    r.read("direction", c.hellinger.direction);
    r.read("step", c.hellinger.step);
    r.finish();
  }
  if (root.has("scan")) {
    Reader r(root.at("scan"), "scan");
    r.read("steps", c.scan.steps);
    r.read("directions", c.scan.directions);
    r.read("radius", c.scan.radius);
    r.finish();
  }
  if (root.has("invariance")) {
    Reader r(root.at("invariance"), "invariance");
    r.read("sizes", c.invariance.sizes);
    r.read("method", c.invariance.method);
    r.read("eval_points", c.invariance.eval_points);
    r.read("sweeps", c.invariance.sweeps);
    r.read("chains", c.invariance.chains);
    r.read("proposal", c.invariance.proposal);
    r.read("rw_scale", c.invariance.rw_scale);
    r.read("burn_in_fraction", c.invariance.burn_in_fraction);
    r.read("draws", c.invariance.draws);
    r.finish();
  }
  if (root.has("map")) {
    Reader r(root.at("map"), "map");
    r.read("regulariser", c.map.regulariser);
    r.read("weight", c.map.weight);
    r.read("tol", c.map.tol);
    r.finish();
  }
  if (root.has("chain")) {
    Reader r(root.at("chain"), "chain");
    r.read("steps", c.chain.steps);
    r.read("burn_in", c.chain.burn_in);
    r.read("proposal", c.chain.proposal);
    r.read("rw_scale", c.chain.rw_scale);
    r.read("thin", c.chain.thin);
    r.read("chains", c.chain.chains);
    r.read("quantiles", c.chain.quantiles);
    r.finish();
  }
}

json sequence_json(const SequenceConfig& s) {
  return {{"kind", s.kind}, {"scale", s.scale}, {"rate", s.rate}, {"level", s.level},
          {"values", s.values}};
}

json config_json(const ExperimentConfig& c) {
  json truth = json::array();
  for (const Jump& j : c.model.truth) truth.push_back({{"at", j.at}, {"height", j.height}});
  return {
      {"experiment", c.experiment},
      {"seed", c.seed},
      {"output_dir", c.output_dir},
      {"stable",
       {{"alpha", c.stable.params.alpha},
        {"beta", c.stable.params.beta},
        {"gamma", c.stable.params.gamma},
        {"delta", c.stable.params.delta},
        {"count", c.stable.count}}},
      {"prior",
       {{"alpha", c.prior.alpha},
        {"beta", c.prior.beta},
        {"basis", c.prior.basis},
        {"grid_size", c.prior.grid_size},
        {"truncation", c.prior.truncation},
        {"q", c.prior.q},
        {"gamma", sequence_json(c.prior.gamma)},
        {"delta", sequence_json(c.prior.delta)}}},
      {"model",
       {{"kind", c.model.kind},
        {"observations", c.model.observations},
        {"kernel_width", c.model.kernel_width},
        {"noise_sigma", c.model.noise_sigma},
        {"truth", truth},
        {"noise_seed", c.model.noise_seed},
        {"data", c.model.data},
        {"matrix", c.model.matrix}}},
      {"monte_carlo", {{"draws", c.monte_carlo.draws}, {"potential", c.monte_carlo.potential}}},
      {"hellinger", {{"direction", c.hellinger.direction}, {"step", c.hellinger.step}}},
      {"scan",
       {{"steps", c.scan.steps}, {"directions", c.scan.directions}, {"radius", c.scan.radius}}},
      {"invariance",
       {{"sizes", c.invariance.sizes},
        {"method", c.invariance.method},
        {"eval_points", c.invariance.eval_points},
        {"sweeps", c.invariance.sweeps},
        {"chains", c.invariance.chains},
        {"proposal", c.invariance.proposal},
        {"rw_scale", c.invariance.rw_scale},
        {"burn_in_fraction", c.invariance.burn_in_fraction},
        {"draws", c.invariance.draws}}},
      {"map",
       {{"regulariser", c.map.regulariser}, {"weight", c.map.weight}, {"tol", c.map.tol}}},
      {"chain",
       {{"steps", c.chain.steps},
        {"burn_in", c.chain.burn_in},
        {"proposal", c.chain.proposal},
        {"rw_scale", c.chain.rw_scale},
        {"thin", c.chain.thin},
        {"chains", c.chain.chains},
        {"quantiles", c.chain.quantiles}}},
  };
}

// ---------------------------------------------------------------- building

SequenceForm sequence_form(const SequenceConfig& s) {
  if (s.kind == "power") return {SequenceForm::Kind::kPower, s.scale, s.rate};
  return {SequenceForm::Kind::kExponential, s.scale, s.rate};
}

// Terms 1..n of a sequence block, or nullopt-form for explicit values.
std::vector<double> sequence_terms(const SequenceConfig& s, double alpha, std::size_t n,
                                   const std::string& name) {
  if (s.kind == "power" || s.kind == "exponential") return sequence_form(s).first(n);
  if (s.kind == "increment") {
    std::vector<double> out(n, s.scale * std::pow(static_cast<double>(n), -1.0 / alpha));
    out[0] = s.level;
    return out;
  }
  if (s.kind == "values") {
    if (s.values.size() < n) {
      throw ShapeError(name + ".values has " + std::to_string(s.values.size()) +
                       " entries, need " + std::to_string(n));
    }
    return {s.values.begin(), s.values.begin() + static_cast<std::ptrdiff_t>(n)};
  }
  throw DomainError(name + ".kind must be power, exponential, increment or values");
}

bool analytic(const SequenceConfig& s) { return s.kind == "power" || s.kind == "exponential"; }

ForwardModel build_forward(const ModelConfig& m, std::size_t n) {
  if (m.kind == "deconvolution") {
    return {deconvolution_operator(n, m.observations, m.kernel_width),
            "gaussian blur, width " + format_double(m.kernel_width)};
  }
  if (m.kind == "matrix") {
    if (m.matrix.empty()) throw ShapeError("model.matrix is empty");
    Eigen::MatrixXd g(static_cast<Eigen::Index>(m.matrix.size()), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < m.matrix.size(); ++i) {
      if (m.matrix[i].size() != n) {
        throw ShapeError("model.matrix row " + std::to_string(i) + " has " +
                         std::to_string(m.matrix[i].size()) + " columns, grid has " +
                         std::to_string(n));
      }
      for (std::size_t k = 0; k < n; ++k) g(i, k) = m.matrix[i][k];
    }
    ForwardModel fm{g, "explicit matrix"};
    validate(fm);
    return fm;
  }
  throw DomainError("model.kind must be deconvolution or matrix");
}

std::size_t observation_count(const ModelConfig& m) {
  return m.kind == "matrix" ? m.matrix.size() : m.observations;
}

std::vector<double> resolve_data(const ModelConfig& m) {
  const std::size_t obs = observation_count(m);
  if (!m.data.empty()) {
    if (m.data.size() != obs) {
      throw ShapeError("model.data has " + std::to_string(m.data.size()) +
                       " entries, the model observes " + std::to_string(obs));
    }
    for (double v : m.data) {
      if (!std::isfinite(v)) throw DomainError("model.data has non-finite entries");
    }
    return m.data;
  }
  if (m.kind != "deconvolution") throw DomainError("model.data is required for matrix models");
  if (!(m.noise_sigma > 0.0)) throw DomainError("model.noise_sigma must be > 0");
  return step_signal_data(m.truth, m.observations, m.kernel_width, m.noise_sigma, m.noise_seed);
}

Potential build_potential(const std::string& kind, const ForwardModel& model,
                          const NoiseModel& noise) {
  if (kind == "gaussian") return gaussian_potential(model, noise);
  if (kind == "zero") return constant_potential(0.0);
  throw DomainError("monte_carlo.potential must be gaussian or zero");
}

std::vector<double> unit_diagonal(std::size_t m) {
  return std::vector<double>(m, 1.0 / std::sqrt(static_cast<double>(m)));
}

// ---------------------------------------------------------------- output

class Artifacts {
 public:
  void add(std::string name, std::string body) { files_.emplace_back(std::move(name), std::move(body)); }
  void add_json(std::string name, const json& j) { add(std::move(name), j.dump(2) + "\n"); }
  const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

std::string grid_header(const char* lead, std::size_t n, const char* prefix) {
  std::string h = lead;
  for (std::size_t i = 0; i < n; ++i) h += "," + std::string(prefix) + std::to_string(i);
  return h + "\n";
}

struct Setup {
  ExpansionSpec prior;
  ForwardModel model;
  std::optional<NoiseModel> noise;
  std::vector<double> y;
};

Setup build_setup(const ExperimentConfig& c, bool with_model) {
  Setup s{build_prior(c.prior, c.prior.grid_size), {}, std::nullopt, {}};
  validate(s.prior);
  sampling_verdict(s.prior);
  if (with_model) {
    s.model = build_forward(c.model, c.prior.grid_size);
    if (!(c.model.noise_sigma > 0.0)) throw DomainError("model.noise_sigma must be > 0");
    s.noise.emplace(NoiseModel::isotropic(observation_count(c.model), c.model.noise_sigma));
    s.y = resolve_data(c.model);
  }
  return s;
}

void require_gate(const ExpansionSpec& prior) {
  if (!sampling_verdict(prior).overall) {
    throw HypothesisError("prior fails the series convergence hypotheses");
  }
}

// ---------------------------------------------------------------- runners

void run_sample_stable(const ExperimentConfig& c, Artifacts& out) {
  validate(c.stable.params);
  if (c.stable.count == 0) throw DomainError("stable.count must be >= 1");
  const auto x = sample_stable(c.stable.params, c.seed, c.stable.count);
  std::string body = "index,value\n";
  for (std::size_t i = 0; i < x.size(); ++i) body += std::to_string(i) + "," + format_double(x[i]) + "\n";
  out.add("samples.csv", std::move(body));
}

void run_sample_prior(const ExperimentConfig& c, Artifacts& out) {
  const Setup s = build_setup(c, false);
  require_gate(s.prior);
  if (c.monte_carlo.draws == 0) throw DomainError("monte_carlo.draws must be >= 1");
  const auto draws = draw_prior_batch(s.prior, c.seed, c.monte_carlo.draws);
  std::string body = grid_header("draw", s.prior.basis.grid_size, "u");
  for (std::size_t i = 0; i < draws.size(); ++i) {
    body += std::to_string(i);
    for (double v : draws[i].grid_values) body += "," + format_double(v);
    body += "\n";
  }
  out.add("prior_draws.csv", std::move(body));
}

std::shared_ptr<const PriorDraws> shared_draws(const Setup& s, const ExperimentConfig& c) {
  require_gate(s.prior);
  if (c.monte_carlo.draws < 2) throw DomainError("monte_carlo.draws must be >= 2");
  return std::make_shared<const PriorDraws>(draw_prior_batch(s.prior, c.seed, c.monte_carlo.draws));
}

void run_posterior(const ExperimentConfig& c, Artifacts& out) {
  const Setup s = build_setup(c, true);
  const Potential phi = build_potential(c.monte_carlo.potential, s.model, *s.noise);
  const auto draws = shared_draws(s, c);
  const WeightedPosterior post = build_posterior(draws, phi, s.y);

  std::string weights = "draw,phi,log_weight,weight\n";
  for (std::size_t i = 0; i < post.size(); ++i) {
    weights += std::to_string(i) + "," + format_double(post.phi[i]) + "," +
               format_double(post.log_weights[i]) + "," + format_double(post.weights[i]) + "\n";
  }
  out.add("weights.csv", std::move(weights));

  const std::size_t grid = s.prior.basis.grid_size;
  std::string summary = "grid_index,mean,median\n";
  std::vector<double> column(post.size());
  for (std::size_t g = 0; g < grid; ++g) {
    double mean = 0.0;
    for (std::size_t i = 0; i < post.size(); ++i) {
      column[i] = (*draws)[i].grid_values[g];
      mean += post.weights[i] * column[i];
    }
    summary += std::to_string(g) + "," + format_double(mean) + "," +
               format_double(weighted_quantile(column, post.weights, 0.5)) + "\n";
  }
  out.add("posterior_summary.csv", std::move(summary));
  out.add_json("summary.json", {{"z", post.z.z},
                                {"z_std_error", post.z.std_error},
                                {"log_z", post.z.log_z},
                                {"ess", post.ess},
                                {"draws", post.size()}});
}

void run_hellinger(const ExperimentConfig& c, Artifacts& out) {
  const Setup s = build_setup(c, true);
  const Potential phi = build_potential(c.monte_carlo.potential, s.model, *s.noise);
  std::vector<double> dir = c.hellinger.direction.empty() ? unit_diagonal(s.y.size())
                                                          : c.hellinger.direction;
  if (dir.size() != s.y.size()) throw ShapeError("hellinger.direction has the wrong dimension");
  if (!std::isfinite(c.hellinger.step)) throw DomainError("hellinger.step must be finite");
  std::vector<double> y2 = s.y;
  for (std::size_t j = 0; j < y2.size(); ++j) y2[j] += c.hellinger.step * dir[j];
  const auto draws = shared_draws(s, c);
  const WeightedPosterior mu = build_posterior(draws, phi, s.y);
  const WeightedPosterior nu = build_posterior(draws, phi, y2);
  const MetricEstimate h = hellinger(mu, nu);
  const MetricEstimate l2 = hellinger_l2(mu, nu);
  const MetricEstimate tv = total_variation(mu, nu);
  std::string body = "metric,value,std_error\n";
  body += "hellinger," + format_double(h.value) + "," + format_double(h.std_error) + "\n";
  body += "hellinger_l2," + format_double(l2.value) + "," + format_double(l2.std_error) + "\n";
  body += "total_variation," + format_double(tv.value) + "," + format_double(tv.std_error) + "\n";
  out.add("metrics.csv", std::move(body));
  std::vector<double> diff(y2.size());
  for (std::size_t j = 0; j < diff.size(); ++j) diff[j] = y2[j] - s.y[j];
  out.add_json("summary.json", {{"data_distance", euclidean_norm(diff)},
                                {"ess_base", mu.ess},
                                {"ess_perturbed", nu.ess},
                                {"clamp_hellinger", h.clamp_magnitude},
                                {"clamp_total_variation", tv.clamp_magnitude}});
}

void run_scan(const ExperimentConfig& c, Artifacts& out) {
  const Setup s = build_setup(c, true);
  const Potential phi = build_potential(c.monte_carlo.potential, s.model, *s.noise);
  std::vector<std::vector<double>> dirs = c.scan.directions;
  if (dirs.empty()) dirs.push_back(unit_diagonal(s.y.size()));
  double radius = c.scan.radius;
  if (radius == 0.0) {
    double reach = 0.0;
    for (const auto& d : dirs) {
      for (double st : c.scan.steps) reach = std::max(reach, std::abs(st) * euclidean_norm(d));
    }
    radius = euclidean_norm(s.y) + reach + 1.0;
  }
  const auto draws = shared_draws(s, c);
  const LipschitzScan scan = hellinger_lipschitz_scan(draws, phi, s.y, dirs, c.scan.steps, radius);
  std::ostringstream csv;
  write_scan_csv(csv, scan);
  out.add("scan.csv", csv.str());
  out.add_json("summary.json", {{"sup_ratio", scan.sup_ratio},
                                {"radius", scan.radius_r},
                                {"integrability_mean", scan.integrability_mean},
                                {"integrability_half_mean", scan.integrability_half_mean}});
}

void run_invariance(const ExperimentConfig& c, Artifacts& out) {
  if (c.prior.truncation != 0) {
    throw DomainError("invariance needs prior.truncation = 0 (full basis at every n)");
  }
  if (c.prior.gamma.kind == "values" || c.prior.delta.kind == "values") {
    throw DomainError("invariance needs prior sequences defined for every grid size");
  }
  InvarianceOptions opt;
  opt.method = summary_method_from_string(c.invariance.method);
  opt.eval_points = c.invariance.eval_points;
  if (opt.eval_points.empty()) {
    for (int j = 0; j < 16; ++j) opt.eval_points.push_back((j + 0.5) / 16.0);
  }
  opt.sweeps = c.invariance.sweeps;
  opt.chains = c.invariance.chains;
  opt.proposal = proposal_from_string(c.invariance.proposal);
  opt.rw_scale = c.invariance.rw_scale;
  opt.burn_in_fraction = c.invariance.burn_in_fraction;
  opt.draws = c.invariance.draws;
  if (opt.sweeps == 0 || opt.chains == 0 || opt.draws < 2) {
    throw DomainError("invariance sweeps, chains and draws must be positive");
  }
  if (!(opt.burn_in_fraction >= 0.0 && opt.burn_in_fraction < 1.0)) {
    throw DomainError("invariance.burn_in_fraction must lie in [0, 1)");
  }
  if (!(c.model.noise_sigma > 0.0)) throw DomainError("model.noise_sigma must be > 0");
  const std::vector<double> y = resolve_data(c.model);
  ModelFamily family = [&c](std::size_t n) {
    return DiscretisedProblem{build_prior(c.prior, n), build_forward(c.model, n),
                              NoiseModel::isotropic(observation_count(c.model), c.model.noise_sigma)};
  };
  // Every member is validated before the first posterior run.
  for (std::size_t n : c.invariance.sizes) {
    const DiscretisedProblem p = family(n);
    validate(p.prior);
    require_gate(p.prior);
  }
  const auto rows = discretisation_invariance_study(family, c.invariance.sizes, y, opt, c.seed);
  std::ostringstream csv;
  write_invariance_csv(csv, rows);
  out.add("invariance.csv", csv.str());
  json drifts = json::array();
  for (const auto& row : rows) drifts.push_back({{"n", row.n}, {"drift", row.drift}});
  out.add_json("summary.json", {{"drifts", drifts}});
}

void run_map(const ExperimentConfig& c, Artifacts& out) {
  const Setup s = build_setup(c, true);
  const Potential phi = gaussian_potential(s.model, *s.noise);
  const Regulariser reg{regulariser_kind_from_string(c.map.regulariser), c.map.weight};
  const std::vector<double> init(s.prior.truncation, 0.0);
  const MapResult res = map_estimate(phi, reg, s.y, init, s.prior.basis, c.map.tol);
  std::string coeffs = "index,coefficient\n";
  for (std::size_t i = 0; i < res.coefficients.size(); ++i) {
    coeffs += std::to_string(i) + "," + format_double(res.coefficients[i]) + "\n";
  }
  out.add("map_coefficients.csv", std::move(coeffs));
  const auto grid = synthesis(res.coefficients, s.prior.basis);
  std::string g = "grid_index,value\n";
  for (std::size_t i = 0; i < grid.size(); ++i) g += std::to_string(i) + "," + format_double(grid[i]) + "\n";
  out.add("map_grid.csv", std::move(g));
  out.add_json("summary.json", {{"objective", res.objective},
                                {"sweeps", res.sweeps},
                                {"initial_objective", res.objective_history.front()}});
}

void run_mcmc(const ExperimentConfig& c, Artifacts& out) {
  const Setup s = build_setup(c, true);
  const Potential phi = build_potential(c.monte_carlo.potential, s.model, *s.noise);
  ChainConfig cfg;
  cfg.steps = c.chain.steps;
  cfg.burn_in = c.chain.burn_in;
  cfg.proposal = proposal_from_string(c.chain.proposal);
  cfg.rw_scale = c.chain.rw_scale;
  cfg.thin = c.chain.thin;
  cfg.seed = c.seed;
  validate(cfg);
  if (c.chain.chains == 0) throw DomainError("chain.chains must be >= 1");
  for (double q : c.chain.quantiles) {
    if (!(q > 0.0 && q < 1.0)) throw DomainError("chain.quantiles must lie in (0, 1)");
  }
  require_gate(s.prior);
  const auto chains = run_chains(s.prior, phi, s.y, cfg, c.chain.chains);
  std::vector<std::vector<double>> pooled;
  json per_chain = json::array();
  for (std::size_t k = 0; k < chains.size(); ++k) {
    std::ostringstream csv;
    write_chain_csv(csv, chains[k]);
    out.add("chain_" + std::to_string(k) + ".csv", csv.str());
    pooled.insert(pooled.end(), chains[k].states.begin(), chains[k].states.end());
    const auto& ess = chains[k].ess_per_coordinate;
    per_chain.push_back({{"acceptance_rate", chains[k].acceptance_rate},
                         {"accepted", chains[k].accepted},
                         {"stored_states", chains[k].states.size()},
                         {"min_ess", *std::min_element(ess.begin(), ess.end())}});
  }
  std::ostringstream q;
  write_quantile_csv(q, chain_summary(pooled, s.prior.basis, c.chain.quantiles));
  out.add("quantiles.csv", q.str());
  out.add_json("summary.json", {{"chains", per_chain}});
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << body;
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("config parse error at line " + std::to_string(line) + ", column " +
                      std::to_string(col) + ": " + e.what());
  }
  ExperimentConfig c;
  Reader r(root, "");
  r.read("experiment", c.experiment);
  r.read("seed", c.seed);
  r.read("output_dir", c.output_dir);
  read_blocks(r, c);
  r.finish();
  const auto& names = experiment_names();
  if (!c.experiment.empty() &&
      std::find(names.begin(), names.end(), c.experiment) == names.end()) {
    throw ConfigError("experiment: unknown experiment '" + c.experiment + "'");
  }
  return c;
}

std::string config_to_json(const ExperimentConfig& config) {
  return config_json(config).dump(2) + "\n";
}

ExpansionSpec build_prior(const PriorConfig& p, std::size_t n) {
  const BasisSpec basis{basis_family_from_string(p.basis), n};
  const std::size_t trunc = p.truncation == 0 ? n : p.truncation;
  if (trunc > n) throw ShapeError("prior.truncation exceeds the grid size");
  ExpansionSpec spec;
  spec.alpha = p.alpha;
  spec.betas.assign(trunc, p.beta);
  spec.gammas = sequence_terms(p.gamma, p.alpha, trunc, "prior.gamma");
  spec.deltas = sequence_terms(p.delta, p.alpha, trunc, "prior.delta");
  spec.basis = basis;
  spec.truncation = trunc;
  spec.q = p.q;
  if (analytic(p.gamma)) spec.gamma_form = sequence_form(p.gamma);
  if (analytic(p.delta)) spec.delta_form = sequence_form(p.delta);
  validate(spec);
  return spec;
}

RunResult run_experiment(const ExperimentConfig& config) {
  Artifacts out;
  const std::string& e = config.experiment;
  if (e == "sample-stable") {
    run_sample_stable(config, out);
  } else if (e == "sample-prior") {
    run_sample_prior(config, out);
  } else if (e == "posterior") {
    run_posterior(config, out);
  } else if (e == "hellinger") {
    run_hellinger(config, out);
  } else if (e == "lipschitz-scan") {
    run_scan(config, out);
  } else if (e == "invariance") {
    run_invariance(config, out);
  } else if (e == "map") {
    run_map(config, out);
  } else if (e == "mcmc") {
    run_mcmc(config, out);
  } else {
    throw ConfigError("experiment: unknown experiment '" + e + "'");
  }
  out.add("config.resolved.json", config_to_json(config));

  const std::filesystem::path dir(config.output_dir);
  std::filesystem::create_directories(dir);
  json artifacts = json::array();
  RunResult result;
  for (const auto& [name, body] : out.files()) {
    write_file(dir / name, body);
    artifacts.push_back({{"file", name}, {"bytes", body.size()}, {"sha256", sha256_hex(body)}});
    result.files.push_back(name);
  }
  const json manifest = {{"experiment", config.experiment},
                         {"seed", config.seed},
                         {"config", config_json(config)},
                         {"artifacts", artifacts}};
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  result.files.push_back("manifest.json");
  return result;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const ValidationError*>(&e)) return 3;
  if (dynamic_cast<const NumericalError*>(&e)) return 4;
  return 1;
}

}  // namespace stablebip
