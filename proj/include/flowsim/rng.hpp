#pragma once

#include <cstdint>

namespace flowsim {

// SplitMix64 (Vigna's reference algorithm). Used everywhere randomness is
// needed so that streams are byte-identical across platforms and trivially
// reproducible in other languages. Seed 0 is a valid seed.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53-bit resolution.
  double next_double() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * next_double();
  }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t next_below(std::uint64_t bound) noexcept {
    return next() % bound;
  }

private:
  std::uint64_t state_;
};

/// One SplitMix64 step as a standalone 64-bit mixer for derived seeds.
inline std::uint64_t mix64(std::uint64_t x) noexcept {
  return SplitMix64(x).next();
}

}  // namespace flowsim
