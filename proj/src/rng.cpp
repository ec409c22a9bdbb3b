#include "secrd/rng.hpp"

#include <cmath>

namespace secrd {

SeededRng::SeededRng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{
      static_cast<std::uint32_t>(seed & 0xffffffffu),
      static_cast<std::uint32_t>(seed >> 32),
      static_cast<std::uint32_t>(stream & 0xffffffffu),
      static_cast<std::uint32_t>(stream >> 32),
  };
  engine_.seed(seq);
}

std::uint64_t SeededRng::next_u64() { return engine_(); }

double SeededRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t SeededRng::bounded(std::uint64_t n) {
  if (n == 0) return 0;
  std::uint64_t mask = ~std::uint64_t{0};
  std::uint64_t limit = n - 1;
  mask >>= (limit == 0) ? 63 : __builtin_clzll(limit);
  for (;;) {
    std::uint64_t v = next_u64() & mask;
    if (v < n) return v;
  }
}

double SeededRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // u1 in (0, 1] keeps the log finite.
  double u1 = 1.0 - uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::complex<double> SeededRng::complex_normal() {
  double re = normal();
  double im = normal();
  return {re * M_SQRT1_2, im * M_SQRT1_2};
}

}  // namespace secrd
