#ifndef STABLEBIP_RNG_HPP_
#define STABLEBIP_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>

namespace stablebip {

// SplitMix64 finaliser. Used only to derive well-separated seeds for
// substreams; the streams themselves come from std::mt19937_64, whose output
// sequence is fixed by the standard.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed of substream `index` of `seed`. Parallel kernels give every block,
// draw or chain its own substream so results do not depend on the thread
// count.
constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  return mix_seed(mix_seed(seed) ^ mix_seed(index + 0x632be59bd9b4e019ULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on the open interval (0, 1), 53 bits.
  double uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard exponential, strictly positive and finite.
  double exponential() { return -std::log(uniform_open()); }

  // Uniform integer in [0, n), n > 0. Rejection keeps it unbiased and, unlike
  // std::uniform_int_distribution, identical across standard libraries.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t x = engine_();
      if (x >= threshold) return x % n;
    }
  }

  // Standard normal by Box-Muller, one variate per call.
  double normal() {
    const double r = std::sqrt(-2.0 * std::log(uniform_open()));
    return r * std::cos(2.0 * M_PI * uniform_open());
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace stablebip

#endif  // STABLEBIP_RNG_HPP_
