#include "stablebip/series_prior.hpp"

#include <algorithm>
#include <cmath>

#include "stablebip/error.hpp"
#include "stablebip/rng.hpp"

namespace stablebip {

double SequenceForm::term(std::size_t n) const {
  const double x = static_cast<double>(n);
  switch (kind) {
    case Kind::kPower: return scale * std::pow(x, -rate);
    case Kind::kExponential: return scale * std::exp(-rate * x);
  }
  return 0.0;
}

std::vector<double> SequenceForm::first(std::size_t count) const {
  std::vector<double> out(count);
  for (std::size_t n = 0; n < count; ++n) out[n] = term(n + 1);
  return out;
}

bool sequence_in_lp(const SequenceForm& form, double p) {
  if (form.scale == 0.0) return true;
  switch (form.kind) {
    case SequenceForm::Kind::kPower:
      return p == kInf ? form.rate >= 0.0 : form.rate * p > 1.0;
    case SequenceForm::Kind::kExponential:
      return form.rate > 0.0 || (form.rate == 0.0 && p == kInf);
  }
  return false;
}

bool sequence_orlicz_finite(const SequenceForm& form, double alpha) {
  if (form.scale == 0.0) return true;
  switch (form.kind) {
    case SequenceForm::Kind::kPower:
      // The log n factor does not change convergence of sum n^(-rate alpha).
      if (form.rate == 0.0) return std::abs(form.scale) == 1.0;
      return form.rate * alpha > 1.0;
    case SequenceForm::Kind::kExponential:
      if (form.rate == 0.0) return std::abs(form.scale) == 1.0;
      return form.rate > 0.0;
  }
  return false;
}

ExpansionSpec make_expansion(double alpha, double beta, const SequenceForm& gamma,
                             const SequenceForm& delta, const BasisSpec& basis,
                             std::size_t truncation, double q) {
  ExpansionSpec spec;
  spec.alpha = alpha;
  spec.betas.assign(truncation, beta);
  spec.gammas = gamma.first(truncation);
  spec.deltas = delta.first(truncation);
  spec.basis = basis;
  spec.truncation = truncation;
  spec.q = q;
  spec.gamma_form = gamma;
  spec.delta_form = delta;
  return spec;
}

void validate(const ExpansionSpec& spec) {
  if (!(spec.alpha > 0.0 && spec.alpha <= 2.0)) {
    throw DomainError("expansion alpha must lie in (0, 2]");
  }
  if (!(spec.q > 0.0)) throw DomainError("expansion q must be > 0");
  validate(spec.basis);
  if (spec.truncation == 0) throw DomainError("expansion truncation must be >= 1");
  if (spec.truncation > spec.basis.count()) {
    throw ShapeError("expansion truncation exceeds the basis count");
  }
  if (spec.betas.size() < spec.truncation || spec.gammas.size() < spec.truncation ||
      spec.deltas.size() < spec.truncation) {
    throw ShapeError("expansion beta/gamma/delta vectors shorter than truncation");
  }
  for (std::size_t n = 0; n < spec.truncation; ++n) {
    if (!(spec.betas[n] > -1.0 && spec.betas[n] < 1.0)) {
      throw DomainError("expansion beta_n must lie in the open interval (-1, 1)");
    }
    if (!(spec.gammas[n] >= 0.0) || !std::isfinite(spec.gammas[n])) {
      throw DomainError("expansion gamma_n must be finite and >= 0");
    }
    if (!std::isfinite(spec.deltas[n])) throw DomainError("expansion delta_n must be finite");
  }
}

namespace {

std::span<const double> leading(const std::vector<double>& v, std::size_t n) {
  return std::span<const double>(v).first(n);
}

bool finite_norm(std::span<const double> v, double p) {
  return std::isfinite(lp_quasinorm(v, p));
}

}  // namespace

ConvergenceVerdict validate_theorem1(const ExpansionSpec& spec) {
  validate(spec);
  if (!(spec.alpha > 0.0 && spec.alpha < 2.0)) {
    throw HypothesisError("series convergence theorem needs alpha in (0, 2); alpha = 2 "
                          "is the Gaussian case");
  }
  ConvergenceVerdict v;
  const auto gammas = leading(spec.gammas, spec.truncation);
  const auto deltas = leading(spec.deltas, spec.truncation);
  v.truncation_level = !spec.gamma_form || !spec.delta_form;

  v.gamma_in_l_alpha = spec.gamma_form ? sequence_in_lp(*spec.gamma_form, spec.alpha)
                                       : finite_norm(gammas, spec.alpha);
  v.delta_in_l_q = spec.delta_form ? sequence_in_lp(*spec.delta_form, spec.q)
                                   : finite_norm(deltas, spec.q);
  v.orlicz_required = spec.alpha == spec.q || spec.alpha == 2.0 * spec.q;
  if (v.orlicz_required) {
    v.orlicz_finite = spec.gamma_form
                          ? sequence_orlicz_finite(*spec.gamma_form, spec.alpha)
                          : std::isfinite(orlicz_log_functional(gammas, spec.alpha));
  }
  v.overall = v.gamma_in_l_alpha && v.delta_in_l_q &&
              (!v.orlicz_required || v.orlicz_finite.value_or(false));
  return v;
}

ConvergenceVerdict sampling_verdict(const ExpansionSpec& spec) {
  validate(spec);
  if (spec.alpha < 2.0) return validate_theorem1(spec);
  ConvergenceVerdict v;
  const auto gammas = leading(spec.gammas, spec.truncation);
  const auto deltas = leading(spec.deltas, spec.truncation);
  v.truncation_level = !spec.gamma_form || !spec.delta_form;
  v.gamma_in_l_alpha = spec.gamma_form ? sequence_in_lp(*spec.gamma_form, 2.0)
                                       : finite_norm(gammas, 2.0);
  v.delta_in_l_q = spec.delta_form ? sequence_in_lp(*spec.delta_form, spec.q)
                                   : finite_norm(deltas, spec.q);
  v.overall = v.gamma_in_l_alpha && v.delta_in_l_q;
  return v;
}

namespace {

void check_gate(const ExpansionSpec& spec, bool override_gate) {
  if (override_gate) {
    validate(spec);
    return;
  }
  const ConvergenceVerdict v = sampling_verdict(spec);
  if (!v.overall) {
    throw HypothesisError(
        std::string("prior fails the series convergence hypotheses (gamma in l^alpha: ") +
        (v.gamma_in_l_alpha ? "yes" : "no") + ", delta in l^q: " +
        (v.delta_in_l_q ? "yes" : "no") + ", log condition: " +
        (v.orlicz_required ? (v.orlicz_finite.value_or(false) ? "finite" : "infinite")
                           : "not required") +
        ")");
  }
}

FunctionDraw draw_with(const ExpansionSpec& spec, const SynthesisOperator& op,
                       std::uint64_t seed) {
  FunctionDraw d;
  d.seed = seed;
  d.coefficients.resize(spec.truncation);
  Rng rng(seed);
  for (std::size_t n = 0; n < spec.truncation; ++n) {
    d.coefficients[n] = sample_stable_one(spec.coefficient_law(n), rng);
  }
  d.grid_values = op.apply(d.coefficients);
  return d;
}

}  // namespace

FunctionDraw draw_prior(const ExpansionSpec& spec, std::uint64_t seed, bool override_gate) {
  check_gate(spec, override_gate);
  return draw_with(spec, SynthesisOperator(spec.basis), seed);
}

PriorDraws draw_prior_batch(const ExpansionSpec& spec, std::uint64_t seed,
                            std::size_t count, bool override_gate) {
  check_gate(spec, override_gate);
  const SynthesisOperator op(spec.basis);
  PriorDraws draws(count);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i) {
    draws[i] = draw_with(spec, op, substream_seed(seed, static_cast<std::uint64_t>(i)));
  }
  return draws;
}

namespace reference {

PriorDraws draw_prior_batch(const ExpansionSpec& spec, std::uint64_t seed,
                            std::size_t count, bool override_gate) {
  check_gate(spec, override_gate);
  const SynthesisOperator op(spec.basis);
  PriorDraws draws;
  draws.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    draws.push_back(draw_with(spec, op, substream_seed(seed, i)));
  }
  return draws;
}

}  // namespace reference

namespace {

// ||u_i||_sup^p for draws i in [0, count), computed in parallel.
std::vector<double> sup_norm_powers(const ExpansionSpec& spec, double p,
                                    std::uint64_t seed, std::size_t count) {
  const SynthesisOperator op(spec.basis);
  std::vector<double> out(count);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(count); ++i) {
    const FunctionDraw d = draw_with(spec, op, substream_seed(seed, static_cast<std::uint64_t>(i)));
    out[i] = std::pow(lp_quasinorm(d.grid_values, kInf), p);
  }
  return out;
}

}  // namespace

double empirical_lp_norm(const ExpansionSpec& spec, double p, std::size_t draws,
                         std::uint64_t seed) {
  validate(spec);
  if (!(p > 0.0)) throw DomainError("empirical_lp_norm needs p > 0");
  if (!(p < spec.alpha)) {
    throw DivergingMomentError("empirical_lp_norm needs p < alpha (moment order)");
  }
  if (p > spec.q) throw DomainError("empirical_lp_norm needs p <= q");
  if (draws == 0) throw DomainError("empirical_lp_norm: draws must be >= 1");
  check_gate(spec, false);
  const std::vector<double> values = sup_norm_powers(spec, p, seed, draws);
  double sum = 0.0;
  for (double x : values) sum += x;
  return sum / static_cast<double>(draws);
}

std::vector<double> running_norm_moment(const ExpansionSpec& spec, double p,
                                        std::uint64_t seed,
                                        std::span<const std::size_t> checkpoints) {
  check_gate(spec, false);
  if (!(p > 0.0)) throw DomainError("running_norm_moment: p must be > 0");
  if (checkpoints.empty()) return {};
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end()) || checkpoints.front() == 0) {
    throw DomainError("running_norm_moment: checkpoints must be increasing and positive");
  }
  const std::vector<double> values = sup_norm_powers(spec, p, seed, checkpoints.back());
  std::vector<double> out;
  double sum = 0.0;
  std::size_t i = 0;
  for (std::size_t cp : checkpoints) {
    for (; i < cp; ++i) sum += values[i];
    out.push_back(sum / static_cast<double>(cp));
  }
  return out;
}

std::vector<TailPoint> tail_decay_profile(const ExpansionSpec& spec,
                                          std::span<const std::size_t> checkpoints,
                                          std::size_t draws, std::uint64_t seed) {
  validate(spec);
  if (draws == 0) throw DomainError("tail_decay_profile: draws must be >= 1");
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    if (checkpoints[k] > spec.truncation || (k > 0 && checkpoints[k] <= checkpoints[k - 1])) {
      throw DomainError("tail_decay_profile: checkpoints must increase and be <= truncation");
    }
  }
  const double p = 0.5 * spec.alpha;
  const SynthesisOperator op(spec.basis);
  const std::size_t ncp = checkpoints.size();
  std::vector<double> tails(draws * ncp);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(draws); ++i) {
    const FunctionDraw d = draw_with(spec, op, substream_seed(seed, static_cast<std::uint64_t>(i)));
    std::vector<double> tail = d.coefficients;
    std::vector<double> grid(spec.basis.grid_size);
    std::size_t zeroed = 0;
    for (std::size_t k = 0; k < ncp; ++k) {
      for (; zeroed < checkpoints[k]; ++zeroed) tail[zeroed] = 0.0;
      op.apply(tail, grid);
      tails[static_cast<std::size_t>(i) * ncp + k] = std::pow(lp_quasinorm(grid, kInf), p);
    }
  }
  std::vector<TailPoint> out(ncp);
  for (std::size_t k = 0; k < ncp; ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < draws; ++i) sum += tails[i * ncp + k];
    out[k] = {checkpoints[k], sum / static_cast<double>(draws)};
  }
  return out;
}

}  // namespace stablebip
