#pragma once

// Counter-based normals: the k-th draw of a stream depends only on (seed, k).
// SplitMix64 finalizer as the hash, Box-Muller for the transform.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace roughcalc {

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

  std::uint64_t bits(std::uint64_t counter) const {
    return mix(key_ + (counter + 1) * 0x9e3779b97f4a7c15ULL);
  }

  // Uniform on (0, 1); never returns 0.
  double uniform(std::uint64_t counter) const {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal(std::uint64_t counter) const {
    const std::uint64_t pair = counter / 2;
    const double u1 = uniform(2 * pair);
    const double u2 = uniform(2 * pair + 1);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return (counter % 2 == 0) ? radius * std::cos(angle) : radius * std::sin(angle);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
};

}  // namespace roughcalc
