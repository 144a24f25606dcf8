#ifndef STABLEBIP_SERIES_PRIOR_HPP_
#define STABLEBIP_SERIES_PRIOR_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stablebip/quasi_banach.hpp"
#include "stablebip/stable_dist.hpp"

namespace stablebip {

// Closed-form description of an infinite sequence a_n, n = 1, 2, ...
//   power:       a_n = scale * n^(-rate)
//   exponential: a_n = scale * exp(-rate * n)
struct SequenceForm {
  enum class Kind { kPower, kExponential };
  Kind kind = Kind::kPower;
  double scale = 0.0;
  double rate = 0.0;

  double term(std::size_t n) const;
  std::vector<double> first(std::size_t count) const;
};

// Is the sequence in l^p (p may be kInf)?
bool sequence_in_lp(const SequenceForm& form, double p);
// Is sum |a_n^alpha log a_n| finite?
bool sequence_orlicz_finite(const SequenceForm& form, double alpha);

// Series prior u = sum_n u_n psi_n with independent u_n ~ S(alpha, beta_n,
// gamma_n, delta_n), truncated after `truncation` terms. The optional forms
// describe the infinite gamma and delta sequences analytically; when present
// the vectors hold their leading terms.
struct ExpansionSpec {
  double alpha = 1.0;
  std::vector<double> betas;
  std::vector<double> gammas;
  std::vector<double> deltas;
  BasisSpec basis;
  std::size_t truncation = 0;
  double q = 1.0;
  std::optional<SequenceForm> gamma_form;
  std::optional<SequenceForm> delta_form;

  StableParams coefficient_law(std::size_t n) const {
    return {alpha, betas[n], gammas[n], deltas[n]};
  }
};

// Builds a spec whose vectors are filled from the forms (beta constant).
ExpansionSpec make_expansion(double alpha, double beta, const SequenceForm& gamma,
                             const SequenceForm& delta, const BasisSpec& basis,
                             std::size_t truncation, double q);

// Structural invariants: 0 < alpha <= 2, |beta_n| < 1, gamma_n >= 0, lengths,
// truncation <= basis count. Alpha = 2 is admitted as the Gaussian reference
// case; the convergence theorem itself rejects it.
void validate(const ExpansionSpec& spec);

struct ConvergenceVerdict {
  bool gamma_in_l_alpha = false;
  bool delta_in_l_q = false;
  bool orlicz_required = false;
  std::optional<bool> orlicz_finite;  // nullopt when not required
  bool overall = false;
  // Decided on the stored finite vectors rather than analytic tails.
  bool truncation_level = false;
};

// Hypotheses of the series convergence theorem for 0 < alpha < 2: gamma in
// l^alpha, delta in l^q, and the l^alpha log l condition when alpha = q or
// alpha = 2q. Throws HypothesisError for alpha outside (0, 2).
ConvergenceVerdict validate_theorem1(const ExpansionSpec& spec);

// Gate used by the samplers: validate_theorem1 for alpha < 2, and the
// classical square-summability of gamma (plus delta in l^q) for the Gaussian
// reference case alpha = 2.
ConvergenceVerdict sampling_verdict(const ExpansionSpec& spec);

struct FunctionDraw {
  std::vector<double> coefficients;
  std::vector<double> grid_values;
  std::uint64_t seed = 0;
};

using PriorDraws = std::vector<FunctionDraw>;

// One prior draw. Throws HypothesisError when the sampling gate fails, unless
// `override_gate` is set (negative-case experiments).
FunctionDraw draw_prior(const ExpansionSpec& spec, std::uint64_t seed,
                        bool override_gate = false);

// `count` draws; draw i uses substream i of `seed`. Parallel over draws.
PriorDraws draw_prior_batch(const ExpansionSpec& spec, std::uint64_t seed,
                            std::size_t count, bool override_gate = false);

// Monte Carlo E[||u||_sup^p]. Requires 0 < p <= q and p < alpha.
double empirical_lp_norm(const ExpansionSpec& spec, double p, std::size_t draws,
                         std::uint64_t seed);

// Running means of ||u||_sup^p at increasing draw-count checkpoints, with no
// moment precondition (heavy-tail diagnostic).
std::vector<double> running_norm_moment(const ExpansionSpec& spec, double p,
                                        std::uint64_t seed,
                                        std::span<const std::size_t> checkpoints);

struct TailPoint {
  std::size_t n = 0;
  double mean_tail = 0.0;
};

// Mean over draws of ||sum_{n > N} u_n psi_n||_sup^(alpha/2) at each
// checkpoint N, all checkpoints on common draws.
std::vector<TailPoint> tail_decay_profile(const ExpansionSpec& spec,
                                          std::span<const std::size_t> checkpoints,
                                          std::size_t draws, std::uint64_t seed);

namespace reference {

PriorDraws draw_prior_batch(const ExpansionSpec& spec, std::uint64_t seed,
                            std::size_t count, bool override_gate = false);

}  // namespace reference

}  // namespace stablebip

#endif  // STABLEBIP_SERIES_PRIOR_HPP_
