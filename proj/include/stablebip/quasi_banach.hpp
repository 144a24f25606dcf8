#ifndef STABLEBIP_QUASI_BANACH_HPP_
#define STABLEBIP_QUASI_BANACH_HPP_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace stablebip {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// l^p quasinorm; p = kInf gives the sup norm. Throws DomainError for p <= 0 or
// non-finite entries.
double lp_quasinorm(std::span<const double> v, double p);

// Smallest K with ||x + y||_p <= K (||x||_p + ||y||_p): max(1, 2^(1/p - 1)).
double weak_triangle_constant(double p);

struct QuasinormSpace {
  double p = 1.0;
  double K = 1.0;
};
QuasinormSpace lp_space(double p);

// sum_n |gamma_n^alpha log gamma_n| with 0 log 0 = 0, natural log.
double orlicz_log_functional(std::span<const double> gamma, double alpha);

enum class BasisFamily { kCanonical, kDifference, kFourier, kHaar };

std::string to_string(BasisFamily family);
BasisFamily basis_family_from_string(const std::string& name);

// A basis of R^grid_size, every vector with unit sup norm on the grid.
//   canonical:  psi_n = e_n
//   difference: psi_n(i) = 1 for i >= n, so synthesis is a cumulative sum
//   fourier:    1, cos(2 pi k x), sin(2 pi k x), ... at x_i = i / grid_size,
//               each rescaled to unit sup norm on the grid
//   haar:       constant, then Haar wavelets coarse to fine (grid_size must
//               be a power of two)
struct BasisSpec {
  BasisFamily family = BasisFamily::kCanonical;
  std::size_t grid_size = 1;

  std::size_t count() const { return grid_size; }
};

void validate(const BasisSpec& basis);

// Grid values of basis vector n (zero-based).
std::vector<double> basis_vector(const BasisSpec& basis, std::size_t n);

// sum_n v_n psi_n on the grid. v may be shorter than the basis.
std::vector<double> synthesis(std::span<const double> v, const BasisSpec& basis);

// Synthesis with the basis tabulated once; for repeated application in
// samplers. Produces exactly the values of synthesis().
class SynthesisOperator {
 public:
  explicit SynthesisOperator(const BasisSpec& basis);

  const BasisSpec& basis() const { return basis_; }
  void apply(std::span<const double> v, std::span<double> out) const;
  std::vector<double> apply(std::span<const double> v) const;

 private:
  BasisSpec basis_;
  // Column-major table (grid_size x count) for the dense families.
  std::shared_ptr<const std::vector<double>> table_;
};

struct FrameSpec {
  BasisSpec basis;
  double q = 1.0;
  double C = 1.0;
};

// Worst observed ||synthesis(v)||_sup / ||v||_q over `trials` random
// coefficient vectors (random sparsity, signs and heavy-tailed magnitudes).
// Deterministic given seed.
double certify_embedding(const FrameSpec& frame, std::size_t trials,
                         std::uint64_t seed);

}  // namespace stablebip

#endif  // STABLEBIP_QUASI_BANACH_HPP_
