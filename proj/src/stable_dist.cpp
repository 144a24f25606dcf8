#include "stablebip/stable_dist.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "stablebip/error.hpp"
#include "stablebip/stats.hpp"

namespace stablebip {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_gaussian(const StableParams& p) { return p.alpha == 2.0; }
bool is_cauchy(const StableParams& p) { return p.alpha == 1.0 && p.beta == 0.0; }
bool is_levy(const StableParams& p) { return p.alpha == 0.5 && p.beta == 1.0; }

std::size_t block_count(std::size_t count) {
  return (count + kSampleBlock - 1) / kSampleBlock;
}

void fill_block(const StableParams& params, std::uint64_t seed,
                std::size_t block, std::span<double> out) {
  Rng rng(substream_seed(seed, block));
  for (double& x : out) x = sample_stable_one(params, rng);
}

double block_abs_moment_sum(const StableParams& params, double p,
                            std::uint64_t seed, std::size_t block,
                            std::size_t len) {
  Rng rng(substream_seed(seed, block));
  double sum = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    sum += std::pow(std::abs(sample_stable_one(params, rng)), p);
  }
  return sum;
}

void check_count(std::size_t count, const char* who) {
  if (count == 0) throw DomainError(std::string(who) + ": count must be >= 1");
}

}  // namespace

void validate(const StableParams& params) {
  const bool finite = std::isfinite(params.alpha) && std::isfinite(params.beta) &&
                      std::isfinite(params.gamma) && std::isfinite(params.delta);
  if (!finite) throw DomainError("stable parameters must be finite");
  if (!(params.alpha > 0.0 && params.alpha <= 2.0)) {
    throw DomainError("stable alpha must lie in (0, 2], got " +
                      std::to_string(params.alpha));
  }
  if (!(params.beta >= -1.0 && params.beta <= 1.0)) {
    throw DomainError("stable beta must lie in [-1, 1], got " +
                      std::to_string(params.beta));
  }
  if (!(params.gamma >= 0.0)) {
    throw DomainError("stable gamma must be >= 0, got " +
                      std::to_string(params.gamma));
  }
}

double sample_stable_one(const StableParams& params, Rng& rng) {
  if (params.gamma == 0.0) return params.delta;
  const double v = kPi * (rng.uniform_open() - 0.5);
  const double w = rng.exponential();
  const double alpha = params.alpha;
  const double beta = params.beta;
  if (alpha == 1.0) {
    const double half_pi = 0.5 * kPi;
    const double bv = half_pi + beta * v;
    double x = bv * std::tan(v);
    if (beta != 0.0) {
      x -= beta * std::log(half_pi * w * std::cos(v) / bv);
      x *= 2.0 / kPi;
      return params.gamma * x +
             2.0 / kPi * beta * params.gamma * std::log(params.gamma) +
             params.delta;
    }
    x *= 2.0 / kPi;
    return params.gamma * x + params.delta;
  }
  double x;
  if (beta == 0.0) {
    x = std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
        std::pow(std::cos(v - alpha * v) / w, (1.0 - alpha) / alpha);
  } else {
    const double t = beta * std::tan(0.5 * kPi * alpha);
    const double b = std::atan(t) / alpha;
    const double s = std::pow(1.0 + t * t, 0.5 / alpha);
    const double avb = alpha * (v + b);
    x = s * std::sin(avb) / std::pow(std::cos(v), 1.0 / alpha) *
        std::pow(std::cos(v - avb) / w, (1.0 - alpha) / alpha);
  }
  return params.gamma * x + params.delta;
}

std::vector<double> sample_stable(const StableParams& params,
                                  std::uint64_t seed, std::size_t count) {
  validate(params);
  check_count(count, "sample_stable");
  std::vector<double> out(count);
  const auto blocks = static_cast<std::int64_t>(block_count(count));
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < blocks; ++b) {
    const std::size_t begin = static_cast<std::size_t>(b) * kSampleBlock;
    const std::size_t len = std::min(kSampleBlock, count - begin);
    fill_block(params, seed, static_cast<std::size_t>(b),
               std::span<double>(out).subspan(begin, len));
  }
  return out;
}

std::optional<double> stable_cdf_closed_form(const StableParams& params,
                                             double x) {
  validate(params);
  if (!std::isfinite(x)) throw DomainError("stable_cdf_closed_form: x must be finite");
  if (params.gamma == 0.0) return x < params.delta ? 0.0 : 1.0;
  const double z = x - params.delta;
  if (is_gaussian(params)) return 0.5 * std::erfc(-z / (2.0 * params.gamma));
  if (is_cauchy(params)) return 0.5 + std::atan(z / params.gamma) / kPi;
  if (is_levy(params)) {
    if (z <= 0.0) return 0.0;
    return std::erfc(std::sqrt(params.gamma / (2.0 * z)));
  }
  return std::nullopt;
}

std::optional<double> stable_log_density_closed_form(const StableParams& params,
                                                     double x) {
  validate(params);
  if (params.gamma == 0.0) return std::nullopt;
  const double z = (x - params.delta) / params.gamma;
  if (is_gaussian(params)) {
    return -0.25 * z * z - std::log(2.0 * params.gamma * std::sqrt(kPi));
  }
  if (is_cauchy(params)) return -std::log(kPi * params.gamma) - std::log1p(z * z);
  return std::nullopt;
}

bool moment_finite(const StableParams& params, double p) {
  validate(params);
  if (!(p > 0.0) || !std::isfinite(p)) {
    throw DomainError("moment order p must be a finite positive number");
  }
  return params.gamma == 0.0 || params.alpha == 2.0 || p < params.alpha;
}

double fractional_moment_estimate(const StableParams& params, double p,
                                  std::uint64_t seed, std::size_t count) {
  if (!moment_finite(params, p)) {
    throw DivergingMomentError("E|X|^p is infinite for p >= alpha < 2");
  }
  check_count(count, "fractional_moment_estimate");
  if (params.gamma == 0.0) return std::pow(std::abs(params.delta), p);
  const std::size_t blocks = block_count(count);
  std::vector<double> partial(blocks);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < static_cast<std::int64_t>(blocks); ++b) {
    const std::size_t begin = static_cast<std::size_t>(b) * kSampleBlock;
    partial[b] = block_abs_moment_sum(params, p, seed, static_cast<std::size_t>(b),
                                      std::min(kSampleBlock, count - begin));
  }
  double sum = 0.0;
  for (double s : partial) sum += s;
  return sum / static_cast<double>(count);
}

std::vector<double> running_abs_moment(const StableParams& params, double p,
                                       std::uint64_t seed,
                                       std::span<const std::size_t> checkpoints) {
  validate(params);
  if (!(p > 0.0)) throw DomainError("moment order p must be positive");
  if (checkpoints.empty()) return {};
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end()) || checkpoints.front() == 0) {
    throw DomainError("running_abs_moment: checkpoints must be increasing and positive");
  }
  const std::vector<double> draws = sample_stable(params, seed, checkpoints.back());
  std::vector<double> out;
  out.reserve(checkpoints.size());
  double sum = 0.0;
  std::size_t i = 0;
  for (std::size_t cp : checkpoints) {
    for (; i < cp; ++i) sum += std::pow(std::abs(draws[i]), p);
    out.push_back(sum / static_cast<double>(cp));
  }
  return out;
}

double stability_shift(const StableParams& params, int n_fold) {
  validate(params);
  if (params.beta != 0.0) {
    throw UnsupportedCaseError("stability shift is only computed for beta = 0");
  }
  if (n_fold < 2) throw DomainError("n_fold must be >= 2");
  const double n = n_fold;
  return (n - std::pow(n, 1.0 / params.alpha)) * params.delta;
}

StabilityReport stability_property_test(const StableParams& params, int n_fold,
                                        std::size_t count, std::uint64_t seed) {
  const double d = stability_shift(params, n_fold);
  if (count < 1000) throw DomainError("stability_property_test needs count >= 1000");
  const auto n = static_cast<std::size_t>(n_fold);
  const std::vector<double> copies = sample_stable(params, substream_seed(seed, 1), count * n);
  const std::vector<double> base = sample_stable(params, substream_seed(seed, 2), count);
  const double rescale = std::pow(static_cast<double>(n_fold), -1.0 / params.alpha);
  std::vector<double> sums(count);
  for (std::size_t i = 0; i < count; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += copies[i * n + k];
    sums[i] = (s - d) * rescale;
  }
  const stats::KsResult ks = stats::ks_two_sample(sums, base);
  return {n_fold, d, ks.statistic, ks.p_value};
}

namespace reference {

std::vector<double> sample_stable(const StableParams& params,
                                  std::uint64_t seed, std::size_t count) {
  validate(params);
  check_count(count, "sample_stable");
  std::vector<double> out(count);
  for (std::size_t b = 0; b < block_count(count); ++b) {
    const std::size_t begin = b * kSampleBlock;
    fill_block(params, seed, b,
               std::span<double>(out).subspan(begin, std::min(kSampleBlock, count - begin)));
  }
  return out;
}

double fractional_moment_estimate(const StableParams& params, double p,
                                  std::uint64_t seed, std::size_t count) {
  if (!moment_finite(params, p)) {
    throw DivergingMomentError("E|X|^p is infinite for p >= alpha < 2");
  }
  check_count(count, "fractional_moment_estimate");
  if (params.gamma == 0.0) return std::pow(std::abs(params.delta), p);
  double sum = 0.0;
  for (std::size_t b = 0; b < block_count(count); ++b) {
    const std::size_t begin = b * kSampleBlock;
    sum += block_abs_moment_sum(params, p, seed, b, std::min(kSampleBlock, count - begin));
  }
  return sum / static_cast<double>(count);
}

}  // namespace reference

}  // namespace stablebip
