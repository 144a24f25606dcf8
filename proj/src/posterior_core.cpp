#include "stablebip/posterior_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stablebip/error.hpp"

namespace stablebip {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Eigen::Map<const Eigen::VectorXd> as_eigen(std::span<const double> v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

}  // namespace

double euclidean_norm(std::span<const double> v) { return as_eigen(v).norm(); }

std::vector<double> ForwardModel::apply(std::span<const double> u) const {
  if (u.size() != grid_size()) throw ShapeError("forward model: grid size mismatch");
  const Eigen::VectorXd out = op * as_eigen(u);
  return {out.data(), out.data() + out.size()};
}

void validate(const ForwardModel& model) {
  if (model.op.size() == 0) throw ShapeError("forward model operator is empty");
  if (!model.op.allFinite()) throw DomainError("forward model has non-finite entries");
}

NoiseModel::NoiseModel(Eigen::MatrixXd covariance) : covariance_(std::move(covariance)) {
  if (covariance_.rows() != covariance_.cols() || covariance_.rows() == 0) {
    throw ShapeError("noise covariance must be a non-empty square matrix");
  }
  if (!covariance_.allFinite()) throw DomainError("noise covariance has non-finite entries");
  const double scale = std::max(1.0, covariance_.cwiseAbs().maxCoeff());
  if ((covariance_ - covariance_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw DomainError("noise covariance is not symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(covariance_);
  if (llt.info() != Eigen::Success) {
    throw FactorizationError("noise covariance is not positive definite");
  }
  cholesky_lower_ = llt.matrixL();
  if ((cholesky_lower_.diagonal().array() <= 0.0).any()) {
    throw FactorizationError("noise covariance is not positive definite");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(covariance_, Eigen::EigenvaluesOnly);
  const double lambda_min = eig.eigenvalues().minCoeff();
  if (!(lambda_min > 0.0)) throw FactorizationError("noise covariance is singular");
  inverse_sqrt_norm_ = 1.0 / std::sqrt(lambda_min);
}

NoiseModel NoiseModel::isotropic(std::size_t dim, double sigma) {
  if (!(sigma > 0.0)) throw DomainError("noise sigma must be > 0");
  const auto n = static_cast<Eigen::Index>(dim);
  return NoiseModel(Eigen::MatrixXd::Identity(n, n) * (sigma * sigma));
}

Eigen::VectorXd NoiseModel::whiten(const Eigen::VectorXd& x) const {
  return cholesky_lower_.triangularView<Eigen::Lower>().solve(x);
}

Eigen::MatrixXd NoiseModel::whiten(const Eigen::MatrixXd& x) const {
  return cholesky_lower_.triangularView<Eigen::Lower>().solve(x);
}

Potential gaussian_potential(const ForwardModel& model, const NoiseModel& noise) {
  validate(model);
  if (model.n_obs() != noise.dim()) {
    throw ShapeError("forward model has " + std::to_string(model.n_obs()) +
                     " observations but the noise covariance is " +
                     std::to_string(noise.dim()) + "-dimensional");
  }
  struct State {
    Eigen::MatrixXd lower;     // Cholesky factor of the covariance
    Eigen::MatrixXd whitened;  // L^{-1} G
  };
  auto state = std::make_shared<State>();
  state->lower = noise.covariance().llt().matrixL();
  state->whitened = noise.whiten(model.op);

  const double w_norm = noise.inverse_sqrt_norm();
  // ||W G||_{sup -> 2} <= sqrt(sum_i ||row_i||_1^2).
  const double wg_norm = state->whitened.cwiseAbs().rowwise().sum().norm();
  const double c1 = w_norm * wg_norm;
  const double c2 = w_norm * w_norm;

  Potential p;
  p.evaluate = [state](std::span<const double> u, std::span<const double> y) {
    if (u.size() != static_cast<std::size_t>(state->whitened.cols()) ||
        y.size() != static_cast<std::size_t>(state->whitened.rows())) {
      throw ShapeError("gaussian potential: dimension mismatch");
    }
    const Eigen::VectorXd wy = state->lower.triangularView<Eigen::Lower>().solve(as_eigen(y));
    const Eigen::VectorXd resid = state->whitened * as_eigen(u) - wy;
    return 0.5 * resid.squaredNorm();
  };
  p.bound_m1 = [](double, double) { return 0.0; };
  p.bound_m2 = [c1, c2](double r, double s) { return std::log(c1 * s + c2 * r); };
  p.description = "gaussian least squares";
  return p;
}

Potential constant_potential(double c) {
  Potential p;
  p.evaluate = [c](std::span<const double>, std::span<const double>) { return c; };
  p.bound_m1 = [c](double, double) { return c; };
  p.bound_m2 = [](double, double) { return kNegInf; };
  p.description = "constant";
  return p;
}

Potential fixed_potential(std::function<double(std::span<const double>)> value) {
  Potential p;
  p.evaluate = [value = std::move(value)](std::span<const double> u, std::span<const double>) {
    return value(u);
  };
  p.bound_m1 = [](double, double) { return kNegInf; };
  p.bound_m2 = [](double, double) { return kNegInf; };
  p.description = "fixed";
  return p;
}

std::vector<double> evaluate_potential(const PriorDraws& draws, const Potential& potential,
                                       std::span<const double> y) {
  std::vector<double> phi(draws.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(draws.size()); ++i) {
    phi[i] = potential.evaluate(draws[i].grid_values, y);
  }
  return phi;
}

namespace reference {

std::vector<double> evaluate_potential(const PriorDraws& draws, const Potential& potential,
                                       std::span<const double> y) {
  std::vector<double> phi(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) {
    phi[i] = potential.evaluate(draws[i].grid_values, y);
  }
  return phi;
}

}  // namespace reference

namespace {

ZEstimate z_from_phi(std::span<const double> phi) {
  if (phi.size() < 2) throw DomainError("estimating Z needs at least two prior draws");
  double lo = std::numeric_limits<double>::infinity();
  for (double v : phi) {
    if (std::isnan(v)) throw DegenerateWeightsError("potential returned NaN");
    lo = std::min(lo, v);
  }
  if (!std::isfinite(lo)) throw DegenerateWeightsError("potential is infinite on every draw");
  const double n = static_cast<double>(phi.size());
  double sum = 0.0;
  for (double v : phi) sum += std::exp(lo - v);
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : phi) {
    const double d = std::exp(lo - v) - mean;
    ss += d * d;
  }
  const double scale = std::exp(-lo);
  ZEstimate z;
  z.z = scale * mean;
  z.std_error = scale * std::sqrt(ss / (n - 1.0) / n);
  z.log_z = std::log(mean) - lo;
  return z;
}

}  // namespace

ZEstimate estimate_z(const PriorDraws& draws, const Potential& potential,
                     std::span<const double> y) {
  if (draws.size() < 2) throw DomainError("estimating Z needs at least two prior draws");
  return z_from_phi(evaluate_potential(draws, potential, y));
}

WeightedPosterior build_posterior(std::shared_ptr<const PriorDraws> draws,
                                  const Potential& potential, std::span<const double> y) {
  if (!draws || draws->size() < 2) {
    throw DomainError("build_posterior needs at least two prior draws");
  }
  WeightedPosterior post;
  post.phi = evaluate_potential(*draws, potential, y);
  post.z = z_from_phi(post.phi);
  const std::size_t m = post.phi.size();
  post.log_weights.resize(m);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) {
    post.log_weights[i] = -post.phi[i];
    top = std::max(top, post.log_weights[i]);
  }
  if (!std::isfinite(top)) throw DegenerateWeightsError("no draw has finite weight");
  post.weights.resize(m);
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double shifted = post.log_weights[i] - top;
    post.weights[i] = shifted < kLogWeightFloor ? 0.0 : std::exp(shifted);
    sum += post.weights[i];
  }
  double sum_sq = 0.0;
  for (double& w : post.weights) {
    w /= sum;
    sum_sq += w * w;
  }
  post.ess = 1.0 / sum_sq;
  post.draws = std::move(draws);
  post.data.assign(y.begin(), y.end());
  return post;
}

BoundsReport verify_bounds(const Potential& potential, const PriorDraws& draws,
                           const std::vector<std::vector<double>>& y_set, double r) {
  std::vector<double> y_norms;
  for (const auto& y : y_set) {
    const double n = euclidean_norm(y);
    if (!(n < r)) {
      throw RadiusError("data vector of norm " + std::to_string(n) +
                        " is outside the radius " + std::to_string(r));
    }
    y_norms.push_back(n);
  }
  BoundsReport report;
  std::vector<double> phi(y_set.size());
  for (std::size_t d = 0; d < draws.size(); ++d) {
    const double s = lp_quasinorm(draws[d].grid_values, kInf);
    const double m1 = potential.bound_m1(r, s);
    const double lipschitz = std::exp(potential.bound_m2(r, s));
    for (std::size_t i = 0; i < y_set.size(); ++i) {
      phi[i] = potential.evaluate(draws[d].grid_values, y_set[i]);
      ++report.checks;
      if (phi[i] < m1 - 1e-12 * (1.0 + std::abs(m1))) {
        report.violations.push_back(
            {BoundViolation::Kind::kLowerBound, d, i, i, phi[i], m1});
      }
    }
    for (std::size_t i = 0; i < y_set.size(); ++i) {
      for (std::size_t j = i + 1; j < y_set.size(); ++j) {
        std::vector<double> diff(y_set[i].size());
        for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = y_set[i][k] - y_set[j][k];
        const double bound = lipschitz * euclidean_norm(diff);
        const double gap = std::abs(phi[i] - phi[j]);
        ++report.checks;
        // Round-off slack relative to the magnitude of the compared values.
        const double slack = 1e-12 * (1.0 + std::abs(phi[i]) + std::abs(phi[j]));
        if (gap > bound + slack) {
          report.violations.push_back({BoundViolation::Kind::kLipschitz, d, i, j, gap, bound});
        }
      }
    }
  }
  return report;
}

}  // namespace stablebip
