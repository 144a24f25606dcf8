#include "stablebip/wellposedness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "stablebip/csv.hpp"
#include "stablebip/error.hpp"
#include "stablebip/prob_metrics.hpp"
#include "stablebip/stats.hpp"

namespace stablebip {

namespace {

Eigen::LLT<Eigen::MatrixXd> spd_factor(const Eigen::MatrixXd& m, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success || !(llt.matrixLLT().diagonal().array() > 0.0).all()) {
    throw FactorizationError(std::string(what) + " is not positive definite");
  }
  return llt;
}

double log_det(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

void check_conjugate_shapes(const Eigen::MatrixXd& G, const Eigen::VectorXd& m0,
                            const Eigen::MatrixXd& C, const NoiseModel& noise,
                            const Eigen::VectorXd& y) {
  if (C.rows() != C.cols() || C.rows() != m0.size()) {
    throw ShapeError("prior covariance does not match the prior mean");
  }
  if (G.cols() != m0.size()) throw ShapeError("forward matrix columns do not match the prior");
  if (G.rows() != y.size() || static_cast<std::size_t>(y.size()) != noise.dim()) {
    throw ShapeError("forward matrix rows, data and noise dimensions disagree");
  }
}

}  // namespace

ConjugateSolution conjugate_posterior_oracle(const Eigen::MatrixXd& G,
                                             const Eigen::VectorXd& prior_mean,
                                             const Eigen::MatrixXd& prior_cov,
                                             const NoiseModel& noise,
                                             const Eigen::VectorXd& y) {
  check_conjugate_shapes(G, prior_mean, prior_cov, noise, y);
  spd_factor(prior_cov, "prior covariance");
  const Eigen::MatrixXd cg = prior_cov * G.transpose();
  const Eigen::MatrixXd s = G * cg + noise.covariance();
  const auto s_llt = spd_factor(s, "innovation covariance");
  const Eigen::MatrixXd gain = s_llt.solve(cg.transpose()).transpose();
  ConjugateSolution out;
  out.posterior_mean = prior_mean + gain * (y - G * prior_mean);
  const Eigen::MatrixXd cov = prior_cov - gain * cg.transpose();
  out.posterior_covariance = 0.5 * (cov + cov.transpose());
  return out;
}

double conjugate_log_evidence(const Eigen::MatrixXd& G, const Eigen::VectorXd& prior_mean,
                              const Eigen::MatrixXd& prior_cov, const NoiseModel& noise,
                              const Eigen::VectorXd& y) {
  check_conjugate_shapes(G, prior_mean, prior_cov, noise, y);
  const Eigen::MatrixXd s = G * prior_cov * G.transpose() + noise.covariance();
  const auto s_llt = spd_factor(s, "innovation covariance");
  const auto n_llt = spd_factor(noise.covariance(), "noise covariance");
  const Eigen::VectorXd r = y - G * prior_mean;
  return 0.5 * log_det(n_llt) - 0.5 * log_det(s_llt) - 0.5 * r.dot(s_llt.solve(r));
}

double gaussian_hellinger(const Eigen::VectorXd& m1, const Eigen::MatrixXd& c1,
                          const Eigen::VectorXd& m2, const Eigen::MatrixXd& c2) {
  if (m1.size() != m2.size() || c1.rows() != m1.size() || c2.rows() != m2.size()) {
    throw ShapeError("gaussian_hellinger: dimension mismatch");
  }
  const Eigen::MatrixXd avg = 0.5 * (c1 + c2);
  const auto llt = spd_factor(avg, "averaged covariance");
  const Eigen::VectorXd d = m1 - m2;
  const double db = 0.125 * d.dot(llt.solve(d)) +
                    0.5 * (log_det(llt) - 0.5 * log_det(spd_factor(c1, "covariance")) -
                           0.5 * log_det(spd_factor(c2, "covariance")));
  return -std::expm1(-db);
}

void gaussian_prior_moments(const ExpansionSpec& spec, Eigen::VectorXd& mean,
                            Eigen::MatrixXd& cov) {
  validate(spec);
  if (spec.alpha != 2.0) {
    throw UnsupportedCaseError("conjugate summaries need a Gaussian (alpha = 2) prior");
  }
  const auto k = static_cast<Eigen::Index>(spec.truncation);
  mean.resize(k);
  cov = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    mean(i) = spec.deltas[i];
    cov(i, i) = 2.0 * spec.gammas[i] * spec.gammas[i];
  }
}

Eigen::MatrixXd synthesis_matrix(const BasisSpec& basis, std::size_t truncation) {
  validate(basis);
  if (truncation > basis.count()) throw ShapeError("truncation exceeds the basis size");
  Eigen::MatrixXd b(static_cast<Eigen::Index>(basis.grid_size),
                    static_cast<Eigen::Index>(truncation));
  for (std::size_t n = 0; n < truncation; ++n) {
    const auto col = basis_vector(basis, n);
    for (std::size_t i = 0; i < col.size(); ++i) b(i, n) = col[i];
  }
  return b;
}

LipschitzScan hellinger_lipschitz_scan(std::shared_ptr<const PriorDraws> draws,
                                       const Potential& potential,
                                       std::span<const double> y0,
                                       const std::vector<std::vector<double>>& directions,
                                       std::span<const double> step_sizes, double r) {
  if (!draws || draws->size() < 2) throw DomainError("scan needs at least two prior draws");
  if (!(r > 0.0)) throw DomainError("radius must be > 0");
  if (!(euclidean_norm(y0) < r)) throw RadiusError("base data lies outside the radius");

  struct Cell {
    double step;
    std::size_t dir;
    std::vector<double> y;
    double distance;
  };
  std::vector<Cell> cells;
  for (std::size_t d = 0; d < directions.size(); ++d) {
    if (directions[d].size() != y0.size()) throw ShapeError("direction has the wrong dimension");
    for (double step : step_sizes) {
      if (!std::isfinite(step)) throw DomainError("step sizes must be finite");
      Cell c{step, d, std::vector<double>(y0.begin(), y0.end()), 0.0};
      for (std::size_t j = 0; j < c.y.size(); ++j) c.y[j] += step * directions[d][j];
      if (!(euclidean_norm(c.y) < r)) {
        throw RadiusError("perturbed data at step " + format_double(step) +
                          " lies outside the radius");
      }
      std::vector<double> diff(c.y.size());
      for (std::size_t j = 0; j < diff.size(); ++j) diff[j] = c.y[j] - y0[j];
      c.distance = euclidean_norm(diff);
      if (c.distance > 0.0) cells.push_back(std::move(c));
    }
  }

  const WeightedPosterior base = build_posterior(draws, potential, y0);
  std::vector<MetricEstimate> estimates(cells.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t k = 0; k < static_cast<std::int64_t>(cells.size()); ++k) {
    const WeightedPosterior other = build_posterior(draws, potential, cells[k].y);
    estimates[k] = hellinger(base, other);
  }

  LipschitzScan scan;
  scan.base_data.assign(y0.begin(), y0.end());
  scan.radius_r = r;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    scan.perturbed_data.push_back(cells[k].y);
    scan.steps.push_back(cells[k].step);
    scan.direction_index.push_back(cells[k].dir);
    scan.distances.push_back(cells[k].distance);
    scan.hellinger_values.push_back(estimates[k].value);
    scan.std_errors.push_back(estimates[k].std_error);
    scan.ratios.push_back(estimates[k].value / cells[k].distance);
    scan.sup_ratio = std::max(scan.sup_ratio, scan.ratios.back());
  }

  const std::size_t m = draws->size();
  double full = 0.0, half = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& g = (*draws)[i].grid_values;
    double s = 0.0;
    for (double x : g) s = std::max(s, std::abs(x));
    const double term = std::exp(2.0 * potential.bound_m2(r, s) - potential.bound_m1(r, s));
    full += term;
    if (i < m / 2) half += term;
  }
  scan.integrability_mean = full / static_cast<double>(m);
  scan.integrability_half_mean = half / static_cast<double>(m / 2);
  return scan;
}

void write_scan_csv(std::ostream& out, const LipschitzScan& scan) {
  out << "step,distance,d_H,std_error,ratio\n";
  for (std::size_t k = 0; k < scan.steps.size(); ++k) {
    out << format_double(scan.steps[k]) << ',' << format_double(scan.distances[k]) << ','
        << format_double(scan.hellinger_values[k]) << ',' << format_double(scan.std_errors[k])
        << ',' << format_double(scan.ratios[k]) << '\n';
  }
}

SummaryMethod summary_method_from_string(const std::string& name) {
  if (name == "conjugate") return SummaryMethod::kConjugate;
  if (name == "mcmc") return SummaryMethod::kMcmc;
  if (name == "importance") return SummaryMethod::kImportance;
  throw DomainError("unknown summary method '" + name + "'");
}

std::string to_string(SummaryMethod method) {
  switch (method) {
    case SummaryMethod::kConjugate: return "conjugate";
    case SummaryMethod::kMcmc: return "mcmc";
    case SummaryMethod::kImportance: return "importance";
  }
  return "conjugate";
}

double relative_l2_drift(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("drift: summaries differ in length");
  double diff = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    ref += a[i] * a[i];
  }
  if (diff == 0.0) return 0.0;
  if (ref == 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(diff / ref);
}

double weighted_quantile(std::span<const double> values, std::span<const double> weights,
                         double prob) {
  if (values.size() != weights.size() || values.empty()) {
    throw ShapeError("weighted_quantile: bad input sizes");
  }
  if (!(prob > 0.0 && prob < 1.0)) throw DomainError("quantile level must lie in (0, 1)");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw DegenerateWeightsError("weighted_quantile: weights sum to zero");
  double cum = 0.0;
  for (std::size_t i : order) {
    cum += weights[i];
    if (cum >= prob * total) return values[i];
  }
  return values[order.back()];
}

namespace {

// Reading of a cell-centred grid function at physical point x: linear
// interpolation between the two nearest cell centres, constant beyond the
// outermost centres. A bare cell lookup would read a cell offset by half a
// width whenever x falls on a cell boundary, a bias of order 1/n.
constexpr std::size_t kMaxStoredStates = 10000;

struct PointReader {
  std::size_t lo = 0;
  std::size_t hi = 0;
  double w = 0.0;

  double operator()(std::span<const double> grid) const {
    return w == 0.0 ? grid[lo] : (1.0 - w) * grid[lo] + w * grid[hi];
  }
};

std::vector<PointReader> point_readers(std::span<const double> points, std::size_t n) {
  std::vector<PointReader> out;
  out.reserve(points.size());
  for (double x : points) {
    if (!(x >= 0.0 && x < 1.0)) throw DomainError("evaluation points must lie in [0, 1)");
    const double t = x * static_cast<double>(n) - 0.5;
    PointReader r;
    if (t <= 0.0) {
      r.lo = r.hi = 0;
    } else if (t >= static_cast<double>(n - 1)) {
      r.lo = r.hi = n - 1;
    } else {
      r.lo = static_cast<std::size_t>(std::floor(t));
      r.hi = r.lo + 1;
      r.w = t - static_cast<double>(r.lo);
    }
    out.push_back(r);
  }
  return out;
}

std::vector<double> conjugate_median(const DiscretisedProblem& p, std::span<const double> y,
                                     const std::vector<PointReader>& at) {
  Eigen::VectorXd m0;
  Eigen::MatrixXd c0;
  gaussian_prior_moments(p.prior, m0, c0);
  const Eigen::MatrixXd b = synthesis_matrix(p.prior.basis, p.prior.truncation);
  const Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), y.size());
  const ConjugateSolution post = conjugate_posterior_oracle(p.model.op * b, m0, c0, p.noise, yv);
  // Point readings are linear, so the Gaussian median at x is the reading of the mean.
  const Eigen::VectorXd grid_mean = b * post.posterior_mean;
  const std::span<const double> g(grid_mean.data(), static_cast<std::size_t>(grid_mean.size()));
  std::vector<double> out;
  for (const auto& r : at) out.push_back(r(g));
  return out;
}

std::vector<double> importance_median(const DiscretisedProblem& p, std::span<const double> y,
                                      const std::vector<PointReader>& at,
                                      const InvarianceOptions& options, std::uint64_t seed) {
  auto draws = std::make_shared<const PriorDraws>(draw_prior_batch(p.prior, seed, options.draws));
  const WeightedPosterior post = build_posterior(draws, gaussian_potential(p.model, p.noise), y);
  std::vector<double> out;
  std::vector<double> column(draws->size());
  for (const auto& r : at) {
    for (std::size_t k = 0; k < draws->size(); ++k) column[k] = r((*draws)[k].grid_values);
    out.push_back(weighted_quantile(column, post.weights, 0.5));
  }
  return out;
}

std::vector<double> mcmc_median(const DiscretisedProblem& p, std::span<const double> y,
                                const std::vector<PointReader>& at,
                                const InvarianceOptions& options, std::uint64_t seed) {
  const bool rw = options.proposal == Proposal::kCoefficientRw;
  const std::size_t per_sweep = rw ? p.prior.truncation : 1;
  ChainConfig cfg;
  cfg.steps = options.sweeps * per_sweep;
  cfg.burn_in = static_cast<std::size_t>(options.burn_in_fraction * static_cast<double>(cfg.steps));
  cfg.proposal = options.proposal;
  cfg.rw_scale = options.rw_scale;
  cfg.seed = seed;
  // Keep at most kMaxStoredStates states per chain, spaced by whole sweeps.
  const std::size_t kept_sweeps = options.sweeps - cfg.burn_in / per_sweep;
  cfg.thin = per_sweep * std::max<std::size_t>(1, (kept_sweeps + kMaxStoredStates - 1) / kMaxStoredStates);
  const auto chains = run_chains(p.prior, gaussian_potential(p.model, p.noise), y, cfg,
                                 options.chains);
  const SynthesisOperator op(p.prior.basis);
  std::vector<std::vector<double>> readings(at.size());
  std::vector<double> grid(p.prior.basis.grid_size);
  for (const auto& c : chains) {
    for (const auto& state : c.states) {
      op.apply(state, grid);
      for (std::size_t k = 0; k < at.size(); ++k) readings[k].push_back(at[k](grid));
    }
  }
  std::vector<double> out;
  for (auto& column : readings) {
    if (column.empty()) throw DomainError("invariance: no post-burn-in states");
    out.push_back(stats::quantile(std::move(column), 0.5));
  }
  return out;
}

}  // namespace

std::vector<InvarianceRow> discretisation_invariance_study(const ModelFamily& family,
                                                           std::span<const std::size_t> sizes,
                                                           std::span<const double> y,
                                                           const InvarianceOptions& options,
                                                           std::uint64_t seed) {
  if (sizes.empty()) throw DomainError("invariance study needs at least one grid size");
  if (options.eval_points.empty()) throw DomainError("invariance study needs evaluation points");
  std::vector<InvarianceRow> rows;
  for (std::size_t n : sizes) {
    const DiscretisedProblem p = family(n);
    validate(p.prior);
    validate(p.model);
    if (p.model.n_obs() != y.size() || p.noise.dim() != y.size()) {
      throw FamilyError("grid size " + std::to_string(n) + " observes " +
                        std::to_string(p.model.n_obs()) + " functionals, data has " +
                        std::to_string(y.size()));
    }
    if (p.model.grid_size() != p.prior.basis.grid_size || p.prior.basis.grid_size != n) {
      throw FamilyError("family member for n = " + std::to_string(n) +
                        " does not live on an n-point grid");
    }
    const auto at = point_readers(options.eval_points, n);
    InvarianceRow row;
    row.n = n;
    switch (options.method) {
      case SummaryMethod::kConjugate: row.median = conjugate_median(p, y, at); break;
      case SummaryMethod::kImportance:
        row.median = importance_median(p, y, at, options, seed);
        break;
      case SummaryMethod::kMcmc: row.median = mcmc_median(p, y, at, options, seed); break;
    }
    if (!rows.empty()) row.drift = relative_l2_drift(rows.back().median, row.median);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_invariance_csv(std::ostream& out, const std::vector<InvarianceRow>& rows) {
  out << "n,drift";
  const std::size_t k = rows.empty() ? 0 : rows.front().median.size();
  for (std::size_t i = 0; i < k; ++i) out << ",m" << i;
  out << '\n';
  for (const auto& row : rows) {
    out << row.n << ',' << format_double(row.drift);
    for (double v : row.median) out << ',' << format_double(v);
    out << '\n';
  }
}

}  // namespace stablebip
