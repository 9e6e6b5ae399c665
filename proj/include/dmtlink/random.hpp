#pragma once

#include "dmtlink/common.hpp"

#include <random>

namespace dmtlink {

// splitmix64 finalizer; used to derive decorrelated child seeds.
std::uint64_t mix_seed(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream);

// Seeded generator with platform-independent output. std::mt19937_64 is
// fully specified by the standard; the normal deviates are produced here
// (Box-Muller) because std::normal_distribution is implementation-defined.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double gaussian();
  Complex complex_gaussian(double variance) {
    const double s = std::sqrt(variance / 2.0);
    const double re = gaussian();
    return {s * re, s * gaussian()};
  }
  std::uint8_t bit() { return static_cast<std::uint8_t>(engine_() >> 63); }

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

} // namespace dmtlink
