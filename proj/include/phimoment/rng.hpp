#pragma once
// Counter-based random streams.  Every stream is keyed by
// (seed, trial_index, variable_index), so parallel and serial runs of the
// same experiment produce bit-identical draws with no shared RNG state.

#include <cmath>
#include <cstdint>

namespace phimoment {

namespace detail {
// splitmix64 output function.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}
}  // namespace detail

class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::uint64_t trial, std::uint64_t var)
      : state_(detail::mix64(detail::mix64(detail::mix64(seed) ^
                                           (0x9E3779B97F4A7C15ull * (trial + 1))) ^
                             (0xC2B2AE3D27D4EB4Full * (var + 1)))) {}

  std::uint64_t next_u64() { return detail::mix64(state_ += 0x9E3779B97F4A7C15ull); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double sign() { return (next_u64() & 1) ? 1.0 : -1.0; }

  // Box-Muller; consumes two uniforms per pair.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01(), u2 = uniform01();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Poisson with rate 1 by inversion of the cumulative pmf (weights
  // 1/(e*n!)); the table covers the mass up to 1 - 5e-17.
  int poisson1() {
    const double u = uniform01();
    double term = 0.36787944117144232160;  // 1/e
    double cum = term;
    int n = 0;
    while (u >= cum && n < 64) {
      ++n;
      term /= n;
      cum += term;
    }
    return n;
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace phimoment
