#pragma once

// Counter-based pseudo-random streams for reproducible parallel sampling.
// A stream is addressed by (seed, hi, lo); its output depends only on those
// coordinates, never on which thread consumes it, so parallel and serial
// executions of the same sampling plan agree bit for bit.

#include <cmath>
#include <cstdint>
#include <vector>

namespace pools::rng {

inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

// Finalizer from splitmix64.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t stream_state(std::uint64_t seed, std::uint64_t hi, std::uint64_t lo) {
  std::uint64_t s = mix64(seed + kGamma);
  s = mix64(s ^ (hi + 0xD1B54A32D192ED03ull));
  s = mix64(s ^ (lo + 0x8CB92BA72F3D8DD7ull));
  return s;
}

// Stable sub-seed derivation for ensemble runs.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed + kGamma * (index + 1));
}

class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t hi, std::uint64_t lo = 0)
      : state_(stream_state(seed, hi, lo)) {}

  std::uint64_t next_u64() {
    state_ += kGamma;
    return mix64(state_);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard exponential; log1p keeps small-u draws exact.
  double next_exponential() { return -std::log1p(-next_double()); }

  // Poisson count by CDF inversion on a single uniform. Rates above 300 are
  // split in half so the linear-space walk never starts in denormal range.
  int poisson(double lambda) {
    if (lambda > 300.0) {
      int first = poisson(lambda * 0.5);
      return first + poisson(lambda * 0.5);
    }
    double u = next_double();
    double p = std::exp(-lambda);
    double cum = p;
    int k = 0;
    const int cap = static_cast<int>(lambda + 12.0 * std::sqrt(lambda) + 60.0);
    while (u >= cum && k < cap) {
      ++k;
      p *= lambda / k;
      cum += p;
    }
    return k;
  }

  // Dirichlet(1,...,1): uniform over the m-simplex.
  std::vector<double> dirichlet_uniform(int m) {
    std::vector<double> v(static_cast<std::size_t>(m));
    double total = 0.0;
    for (auto& x : v) {
      x = next_exponential();
      total += x;
    }
    for (auto& x : v) x /= total;
    return v;
  }

 private:
  std::uint64_t state_;
};

}  // namespace pools::rng
