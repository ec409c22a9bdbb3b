#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace secrd {

// Deterministic stream-splittable generator. All draws are derived from the raw
// 64-bit output of std::mt19937_64 (whose sequence is fixed by the standard)
// through explicit arithmetic, so a given (seed, stream) pair produces the same
// draw sequence on every platform and at every thread count.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();

  // Uniform on [0, 1), 53-bit resolution.
  double uniform();

  // Uniform on {0, ..., n-1}, n >= 1. Masked rejection, bias-free.
  std::uint64_t bounded(std::uint64_t n);

  // Standard normal via Box-Muller; pairs are cached, draw order is fixed.
  double normal();

  // Circularly symmetric complex normal, unit total variance.
  std::complex<double> complex_normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace secrd
