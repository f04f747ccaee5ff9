#pragma once

#include <cstdint>
#include <random>

namespace emot {

// Seeded 64-bit Mersenne Twister with a hand-rolled double conversion.
// std::mt19937_64's output sequence is fixed by the standard, while the
// standard distributions are not, so instances are reproducible across
// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace emot
