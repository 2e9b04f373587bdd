#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace vceo::detail {

/// SplitMix64 finalizer: a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based stream: the value at (seed, counter) does not depend on
/// how many values were drawn before it, so sampling shards freely.
constexpr std::uint64_t counter_bits(std::uint64_t seed, std::uint64_t counter) {
  return mix64(mix64(seed) ^ mix64(counter ^ 0xd1b54a32d192ed03ULL));
}

/// Uniform double in (0, 1).
constexpr double to_open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Pair of independent standard normals from counter `c` (Box-Muller).
inline void normal_pair(std::uint64_t seed, std::uint64_t c, double& z0, double& z1) {
  const double u1 = to_open_unit(counter_bits(seed, 2 * c));
  const double u2 = to_open_unit(counter_bits(seed, 2 * c + 1));
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double th = 2.0 * std::numbers::pi * u2;
  z0 = r * std::cos(th);
  z1 = r * std::sin(th);
}

/// Small sequential generator for optimizer start points.
class SplitMix {
 public:
  explicit SplitMix(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_ - 0x9e3779b97f4a7c15ULL);
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * to_open_unit(next()); }

 private:
  std::uint64_t state_;
};

}  // namespace vceo::detail
