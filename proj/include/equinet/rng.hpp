#pragma once

#include <cstdint>
#include <random>

namespace equinet {

/// Seeded RNG wrapper. The uniform mapping uses the top-53-bit construction
/// instead of std::uniform_real_distribution, whose output is implementation
/// defined; runs are reproducible bit for bit for a given seed.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) {
    double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }

  /// Uniform-ish index in [0, bound); modulo bias is irrelevant at the bound
  /// sizes used here and keeps the draw count per call fixed.
  int index(int bound) {
    return static_cast<int>(engine_() % static_cast<std::uint64_t>(bound));
  }

  std::uint64_t next() { return engine_(); }

private:
  std::mt19937_64 engine_;
};

} // namespace equinet
