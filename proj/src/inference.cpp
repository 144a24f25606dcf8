#include "stablebip/inference.hpp"

#include <algorithm>
#include <cmath>

#include "stablebip/csv.hpp"
#include "stablebip/error.hpp"
#include "stablebip/rng.hpp"
#include "stablebip/stats.hpp"

namespace stablebip {

double Regulariser::value(std::span<const double> v) const {
  switch (kind) {
    case RegulariserKind::kNone: return 0.0;
    case RegulariserKind::kQuadratic: {
      double s = 0.0;
      for (double x : v) s += x * x;
      return 0.5 * weight * s;
    }
    case RegulariserKind::kOneNorm: {
      double s = 0.0;
      for (double x : v) s += std::abs(x);
      return weight * s;
    }
  }
  return 0.0;
}

RegulariserKind regulariser_kind_from_string(const std::string& name) {
  if (name == "quadratic") return RegulariserKind::kQuadratic;
  if (name == "one_norm") return RegulariserKind::kOneNorm;
  if (name == "none") return RegulariserKind::kNone;
  throw DomainError("unknown regulariser '" + name + "'");
}

namespace {

constexpr double kGolden = 0.61803398874989484820;

struct LineMin {
  double t;
  double f;
};

// Minimises a unimodal g starting from t0 with value f0: bracket by doubling
// steps, then golden-section search. Returns the best point evaluated.
template <typename F>
LineMin line_minimise(F&& g, double t0, double f0) {
  LineMin best{t0, f0};
  auto eval = [&](double t) {
    const double f = g(t);
    if (f < best.f) best = {t, f};
    return f;
  };
  const double h = 0.1 * std::max(1.0, std::abs(t0));
  double lo, hi;
  const double f_right = eval(t0 + h);
  if (f_right < f0) {
    double prev = t0, cur = t0 + h, f_cur = f_right;
    double next = cur + 2.0 * (cur - prev);
    double f_next = eval(next);
    for (int k = 0; k < 200 && f_next < f_cur; ++k) {
      prev = cur;
      cur = next;
      f_cur = f_next;
      next = cur + 2.0 * (cur - prev);
      f_next = eval(next);
    }
    lo = prev;
    hi = next;
  } else {
    const double f_left = eval(t0 - h);
    if (f_left < f0) {
      double prev = t0, cur = t0 - h, f_cur = f_left;
      double next = cur + 2.0 * (cur - prev);
      double f_next = eval(next);
      for (int k = 0; k < 200 && f_next < f_cur; ++k) {
        prev = cur;
        cur = next;
        f_cur = f_next;
        next = cur + 2.0 * (cur - prev);
        f_next = eval(next);
      }
      lo = next;
      hi = prev;
    } else {
      lo = t0 - h;
      hi = t0 + h;
    }
  }
  double x1 = hi - kGolden * (hi - lo);
  double x2 = lo + kGolden * (hi - lo);
  double f1 = eval(x1);
  double f2 = eval(x2);
  for (int k = 0; k < 300; ++k) {
    if (hi - lo <= 1e-13 * (1.0 + std::abs(best.t))) break;
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kGolden * (hi - lo);
      f1 = eval(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kGolden * (hi - lo);
      f2 = eval(x2);
    }
  }
  return best;
}

}  // namespace

MapResult map_estimate(const Potential& potential, const Regulariser& reg,
                       std::span<const double> y, std::span<const double> init,
                       const BasisSpec& basis, double tol) {
  if (!(tol > 0.0)) throw DomainError("map_estimate: tol must be > 0");
  if (!(reg.weight >= 0.0)) throw DomainError("regulariser weight must be >= 0");
  if (init.empty()) throw ShapeError("map_estimate: empty initial coefficients");
  const SynthesisOperator op(basis);
  if (init.size() > basis.count()) throw ShapeError("map_estimate: init longer than the basis");

  std::vector<double> v(init.begin(), init.end());
  std::vector<double> grid(basis.grid_size);
  auto objective = [&](std::span<const double> coeffs) {
    op.apply(coeffs, grid);
    return potential.evaluate(grid, y) + reg.value(coeffs);
  };

  MapResult result;
  double current = objective(v);
  if (!std::isfinite(current)) throw DomainError("map_estimate: objective not finite at init");
  result.objective_history.push_back(current);
  for (std::size_t sweep = 1; sweep <= kMaxMapSweeps; ++sweep) {
    const double before = current;
    for (std::size_t j = 0; j < v.size(); ++j) {
      const double keep = v[j];
      auto along = [&](double t) {
        v[j] = t;
        return objective(v);
      };
      const LineMin m = line_minimise(along, keep, current);
      v[j] = m.t;
      current = m.f;
    }
    result.objective_history.push_back(current);
    if (before - current < tol) {
      result.coefficients = v;
      result.objective = current;
      result.sweeps = sweep;
      return result;
    }
  }
  throw IterationLimitError("map_estimate: no convergence within " +
                                std::to_string(kMaxMapSweeps) + " sweeps",
                            v, current);
}

Proposal proposal_from_string(const std::string& name) {
  if (name == "independence_prior") return Proposal::kIndependencePrior;
  if (name == "coefficient_rw") return Proposal::kCoefficientRw;
  throw DomainError("unknown proposal '" + name + "'");
}

std::string to_string(Proposal proposal) {
  return proposal == Proposal::kIndependencePrior ? "independence_prior" : "coefficient_rw";
}

void validate(const ChainConfig& config) {
  if (config.steps == 0) throw DomainError("chain steps must be >= 1");
  if (config.burn_in >= config.steps) throw DomainError("chain burn_in must be < steps");
  if (!(config.rw_scale > 0.0)) throw DomainError("chain rw_scale must be > 0");
  if (config.thin == 0) throw DomainError("chain thin must be >= 1");
}

ChainResult mh_sample(const ExpansionSpec& prior, const Potential& potential,
                      std::span<const double> y, const ChainConfig& config) {
  validate(config);
  const ConvergenceVerdict verdict = sampling_verdict(prior);
  if (!verdict.overall) throw HypothesisError("mh_sample: prior fails the convergence hypotheses");
  const std::size_t dim = prior.truncation;
  const bool rw = config.proposal == Proposal::kCoefficientRw;
  if (rw) {
    for (std::size_t n = 0; n < dim; ++n) {
      const StableParams law = prior.coefficient_law(n);
      const bool closed = law.alpha == 2.0 || (law.alpha == 1.0 && law.beta == 0.0);
      if (!closed) {
        throw UnsupportedCaseError(
            "coefficient_rw needs Cauchy or Gaussian coefficient laws; use independence_prior");
      }
    }
  }
  const SynthesisOperator op(prior.basis);
  Rng rng(config.seed);
  auto draw_prior_state = [&](std::vector<double>& out) {
    for (std::size_t n = 0; n < dim; ++n) out[n] = sample_stable_one(prior.coefficient_law(n), rng);
  };
  std::vector<double> current(dim);
  std::vector<double> proposal(dim);
  std::vector<double> grid(prior.basis.grid_size);
  draw_prior_state(current);
  op.apply(current, grid);
  double current_phi = potential.evaluate(grid, y);

  ChainResult result;
  result.states.reserve((config.steps - config.burn_in) / config.thin + 1);
  for (std::size_t step = 0; step < config.steps; ++step) {
    double log_accept = 0.0;
    double proposal_phi = current_phi;
    std::size_t moved = dim;
    if (!rw) {
      draw_prior_state(proposal);
      op.apply(proposal, grid);
      proposal_phi = potential.evaluate(grid, y);
      log_accept = current_phi - proposal_phi;
    } else {
      moved = static_cast<std::size_t>(rng.below(dim));
      const StableParams law = prior.coefficient_law(moved);
      if (law.gamma > 0.0) {
        const StableParams step_law{law.alpha, 0.0, config.rw_scale * law.gamma, 0.0};
        proposal = current;
        proposal[moved] += sample_stable_one(step_law, rng);
        op.apply(proposal, grid);
        proposal_phi = potential.evaluate(grid, y);
        log_accept = current_phi - proposal_phi +
                     *stable_log_density_closed_form(law, proposal[moved]) -
                     *stable_log_density_closed_form(law, current[moved]);
      } else {
        moved = dim;  // degenerate coordinate, nothing to move
      }
    }
    const bool accept = log_accept >= 0.0 || std::log(rng.uniform_open()) < log_accept;
    if (accept) {
      if (!rw) {
        current.swap(proposal);
      } else if (moved < dim) {
        current[moved] = proposal[moved];
      }
      current_phi = proposal_phi;
    }
    if (step >= config.burn_in) {
      if (accept) ++result.accepted;
      if ((step - config.burn_in) % config.thin == 0) result.states.push_back(current);
    }
  }
  result.acceptance_rate = static_cast<double>(result.accepted) /
                           static_cast<double>(config.steps - config.burn_in);
  result.ess_per_coordinate.resize(dim);
  std::vector<double> series(result.states.size());
  for (std::size_t n = 0; n < dim; ++n) {
    for (std::size_t t = 0; t < series.size(); ++t) series[t] = result.states[t][n];
    result.ess_per_coordinate[n] = stats::effective_sample_size(series);
  }
  return result;
}

std::vector<ChainResult> run_chains(const ExpansionSpec& prior, const Potential& potential,
                                    std::span<const double> y, const ChainConfig& config,
                                    std::size_t chains) {
  validate(config);
  std::vector<ChainResult> results(chains);
  std::vector<std::string> errors(chains);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(chains); ++c) {
    ChainConfig cfg = config;
    cfg.seed = substream_seed(config.seed, static_cast<std::uint64_t>(c));
    try {
      results[c] = mh_sample(prior, potential, y, cfg);
    } catch (const std::exception& e) {
      errors[c] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw NumericalError("run_chains: " + e);
  }
  return results;
}

QuantileTable chain_summary(std::span<const std::vector<double>> states,
                            const BasisSpec& basis, std::span<const double> quantiles) {
  if (states.empty()) throw DomainError("chain_summary: no post-burn-in states");
  for (double q : quantiles) {
    if (!(q > 0.0 && q < 1.0)) throw DomainError("chain_summary: quantiles must lie in (0, 1)");
  }
  const SynthesisOperator op(basis);
  const std::size_t grid = basis.grid_size;
  std::vector<double> values(states.size() * grid);
  for (std::size_t t = 0; t < states.size(); ++t) {
    op.apply(states[t], std::span<double>(values).subspan(t * grid, grid));
  }
  QuantileTable table;
  table.quantiles.assign(quantiles.begin(), quantiles.end());
  table.values.assign(quantiles.size(), std::vector<double>(grid));
  std::vector<double> column(states.size());
  for (std::size_t i = 0; i < grid; ++i) {
    for (std::size_t t = 0; t < states.size(); ++t) column[t] = values[t * grid + i];
    std::sort(column.begin(), column.end());
    for (std::size_t k = 0; k < quantiles.size(); ++k) {
      table.values[k][i] = stats::quantile_sorted(column, quantiles[k]);
    }
  }
  return table;
}

QuantileTable chain_summary(const ChainResult& result, const BasisSpec& basis,
                            std::span<const double> quantiles) {
  return chain_summary(std::span<const std::vector<double>>(result.states), basis, quantiles);
}

void write_chain_csv(std::ostream& out, const ChainResult& result) {
  const std::size_t dim = result.states.empty() ? 0 : result.states.front().size();
  out << "state";
  for (std::size_t n = 0; n < dim; ++n) out << ",c" << n;
  out << '\n';
  for (std::size_t t = 0; t < result.states.size(); ++t) {
    out << t;
    for (double x : result.states[t]) out << ',' << format_double(x);
    out << '\n';
  }
}

void write_quantile_csv(std::ostream& out, const QuantileTable& table) {
  out << "grid_index";
  for (double q : table.quantiles) out << ",q" << format_label(q);
  out << '\n';
  const std::size_t grid = table.values.empty() ? 0 : table.values.front().size();
  for (std::size_t i = 0; i < grid; ++i) {
    out << i;
    for (const auto& row : table.values) out << ',' << format_double(row[i]);
    out << '\n';
  }
}

}  // namespace stablebip
