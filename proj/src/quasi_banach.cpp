#include "stablebip/quasi_banach.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "stablebip/error.hpp"
#include "stablebip/rng.hpp"

namespace stablebip {

double lp_quasinorm(std::span<const double> v, double p) {
  if (!(p > 0.0)) throw DomainError("lp_quasinorm: p must be > 0");
  double maxabs = 0.0;
  for (double x : v) {
    if (!std::isfinite(x)) throw DomainError("lp_quasinorm: non-finite entry");
    maxabs = std::max(maxabs, std::abs(x));
  }
  if (p == kInf || maxabs == 0.0) return maxabs;
  // Scale by the largest entry so |x|^p neither overflows nor underflows.
  double sum = 0.0;
  for (double x : v) sum += std::pow(std::abs(x) / maxabs, p);
  return maxabs * std::pow(sum, 1.0 / p);
}

double weak_triangle_constant(double p) {
  if (!(p > 0.0)) throw DomainError("weak_triangle_constant: p must be > 0");
  if (p >= 1.0) return 1.0;
  return std::pow(2.0, 1.0 / p - 1.0);
}

QuasinormSpace lp_space(double p) { return {p, weak_triangle_constant(p)}; }

double orlicz_log_functional(std::span<const double> gamma, double alpha) {
  if (!(alpha > 0.0)) throw DomainError("orlicz_log_functional: alpha must be > 0");
  double sum = 0.0;
  for (double g : gamma) {
    if (!(g >= 0.0) || !std::isfinite(g)) {
      throw DomainError("orlicz_log_functional: entries must be finite and >= 0");
    }
    if (g == 0.0) continue;
    sum += std::abs(std::pow(g, alpha) * std::log(g));
  }
  return sum;
}

std::string to_string(BasisFamily family) {
  switch (family) {
    case BasisFamily::kCanonical: return "canonical";
    case BasisFamily::kDifference: return "difference";
    case BasisFamily::kFourier: return "fourier";
    case BasisFamily::kHaar: return "haar";
  }
  return "unknown";
}

BasisFamily basis_family_from_string(const std::string& name) {
  if (name == "canonical") return BasisFamily::kCanonical;
  if (name == "difference") return BasisFamily::kDifference;
  if (name == "fourier") return BasisFamily::kFourier;
  if (name == "haar") return BasisFamily::kHaar;
  throw DomainError("unknown basis family '" + name + "'");
}

void validate(const BasisSpec& basis) {
  if (basis.grid_size == 0) throw DomainError("basis grid_size must be >= 1");
  if (basis.family == BasisFamily::kHaar &&
      (basis.grid_size & (basis.grid_size - 1)) != 0) {
    throw DomainError("haar basis needs a power-of-two grid_size");
  }
}

namespace {

std::vector<double> fourier_vector(std::size_t grid, std::size_t n) {
  std::vector<double> out(grid, 1.0);
  if (n == 0) return out;
  const std::size_t k = (n + 1) / 2;
  const bool cosine = (n % 2) == 1;
  double sup = 0.0;
  for (std::size_t i = 0; i < grid; ++i) {
    const double arg = 2.0 * std::numbers::pi * static_cast<double>(k) *
                       static_cast<double>(i) / static_cast<double>(grid);
    out[i] = cosine ? std::cos(arg) : std::sin(arg);
    sup = std::max(sup, std::abs(out[i]));
  }
  for (double& x : out) x /= sup;
  return out;
}

std::vector<double> haar_vector(std::size_t grid, std::size_t n) {
  std::vector<double> out(grid, 0.0);
  if (n == 0) {
    std::fill(out.begin(), out.end(), 1.0);
    return out;
  }
  std::size_t level = 0;
  while ((std::size_t{2} << level) <= n) ++level;
  const std::size_t shift = n - (std::size_t{1} << level);
  const std::size_t support = grid >> level;
  const std::size_t start = shift * support;
  for (std::size_t i = 0; i < support; ++i) {
    out[start + i] = i < support / 2 ? 1.0 : -1.0;
  }
  return out;
}

}  // namespace

std::vector<double> basis_vector(const BasisSpec& basis, std::size_t n) {
  validate(basis);
  if (n >= basis.count()) throw ShapeError("basis index out of range");
  const std::size_t grid = basis.grid_size;
  switch (basis.family) {
    case BasisFamily::kCanonical: {
      std::vector<double> out(grid, 0.0);
      out[n] = 1.0;
      return out;
    }
    case BasisFamily::kDifference: {
      std::vector<double> out(grid, 0.0);
      std::fill(out.begin() + static_cast<std::ptrdiff_t>(n), out.end(), 1.0);
      return out;
    }
    case BasisFamily::kFourier: return fourier_vector(grid, n);
    case BasisFamily::kHaar: return haar_vector(grid, n);
  }
  throw DomainError("unknown basis family");
}

SynthesisOperator::SynthesisOperator(const BasisSpec& basis) : basis_(basis) {
  validate(basis_);
  if (basis_.family == BasisFamily::kFourier || basis_.family == BasisFamily::kHaar) {
    auto table = std::make_shared<std::vector<double>>();
    table->reserve(basis_.grid_size * basis_.count());
    for (std::size_t n = 0; n < basis_.count(); ++n) {
      const auto col = basis_vector(basis_, n);
      table->insert(table->end(), col.begin(), col.end());
    }
    table_ = std::move(table);
  }
}

void SynthesisOperator::apply(std::span<const double> v, std::span<double> out) const {
  const std::size_t grid = basis_.grid_size;
  if (v.size() > basis_.count()) {
    throw ShapeError("synthesis: " + std::to_string(v.size()) +
                     " coefficients for a basis of " + std::to_string(basis_.count()));
  }
  if (out.size() != grid) throw ShapeError("synthesis: output size mismatch");
  switch (basis_.family) {
    case BasisFamily::kCanonical:
      std::copy(v.begin(), v.end(), out.begin());
      std::fill(out.begin() + static_cast<std::ptrdiff_t>(v.size()), out.end(), 0.0);
      return;
    case BasisFamily::kDifference: {
      double run = 0.0;
      for (std::size_t i = 0; i < grid; ++i) {
        if (i < v.size()) run += v[i];
        out[i] = run;
      }
      return;
    }
    default: {
      std::fill(out.begin(), out.end(), 0.0);
      const double* col = table_->data();
      for (std::size_t n = 0; n < v.size(); ++n, col += grid) {
        const double c = v[n];
        if (c == 0.0) continue;
        for (std::size_t i = 0; i < grid; ++i) out[i] += c * col[i];
      }
      return;
    }
  }
}

std::vector<double> SynthesisOperator::apply(std::span<const double> v) const {
  std::vector<double> out(basis_.grid_size);
  apply(v, out);
  return out;
}

std::vector<double> synthesis(std::span<const double> v, const BasisSpec& basis) {
  return SynthesisOperator(basis).apply(v);
}

double certify_embedding(const FrameSpec& frame, std::size_t trials,
                         std::uint64_t seed) {
  if (trials == 0) throw DomainError("certify_embedding: trials must be >= 1");
  if (!(frame.q > 0.0)) throw DomainError("certify_embedding: q must be > 0");
  const SynthesisOperator op(frame.basis);
  const std::size_t count = frame.basis.count();
  Rng rng(seed);
  std::vector<double> v(count);
  std::vector<double> grid(frame.basis.grid_size);
  double worst = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    std::fill(v.begin(), v.end(), 0.0);
    const std::size_t support = 1 + rng.below(count);
    for (std::size_t k = 0; k < support; ++k) {
      const double magnitude =
          std::abs(std::tan(std::numbers::pi * (rng.uniform_open() - 0.5)));
      const double sign = rng.below(2) == 0 ? -1.0 : 1.0;
      v[rng.below(count)] = sign * magnitude;
    }
    const double norm = lp_quasinorm(v, frame.q);
    if (norm == 0.0) continue;
    op.apply(v, grid);
    worst = std::max(worst, lp_quasinorm(grid, kInf) / norm);
  }
  return worst;
}

}  // namespace stablebip
