#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace meshot {

// Stateless SplitMix64 keyed by (seed, counter). Each sample draws from its own
// counter, so parallel loops produce the same noise in any order.
inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + counter * 0xD1B54A32D192ED03ULL + 0x632BE59BD9B4E019ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Circular complex Gaussian with E|n|^2 = power, drawn from counter `index`.
inline std::complex<double> complex_gaussian(std::uint64_t seed, std::uint64_t index, double power) {
  const std::uint64_t a = counter_hash(seed, 2 * index);
  const std::uint64_t b = counter_hash(seed, 2 * index + 1);
  // (0, 1] keeps log finite.
  const double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
  const double radius = std::sqrt(-power * std::log(u1));
  return std::polar(radius, 2.0 * std::numbers::pi * u2);
}

}  // namespace meshot
