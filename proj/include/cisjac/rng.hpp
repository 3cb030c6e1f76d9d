#pragma once

#include <cstdint>
#include <random>

namespace cisjac {

// Seeded random source with a fixed bit mapping to doubles, so streams are
// identical across standard libraries (std::uniform_real_distribution is
// implementation-defined and must not be used for anything reproducible).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t bits() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace cisjac
