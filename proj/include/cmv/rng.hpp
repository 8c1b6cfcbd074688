#pragma once

#include <cstdint>

#include "cmv/common.hpp"

namespace cmv {

// Counter-based pseudo-random primitives (SplitMix64 finalizer).  Every
// draw is a pure function of (seed, stream, counter), so coefficient n of
// sample stream s is reproducible without generating any prefix and
// independent of evaluation order.

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

inline std::uint64_t hash_counter(std::uint64_t seed, std::uint64_t stream,
                                  std::int64_t counter) {
  std::uint64_t h = mix64(seed + kGolden);
  h = mix64(h ^ (stream * 0xBF58476D1CE4E5B9ull + 0x94D049BB133111EBull));
  h = mix64(h ^ (static_cast<std::uint64_t>(counter) * 0x2545F4914F6CDD1Dull + kGolden));
  return h;
}

/// Map 64 bits to [0,1) using the top 53 bits.
inline double unit_double(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Uniform (area measure) point in the closed disk of the given radius.
inline Complex disk_point(std::uint64_t seed, std::uint64_t stream,
                          std::int64_t counter, double radius) {
  const std::uint64_t h = hash_counter(seed, stream, counter);
  const double angle = kTwoPi * unit_double(h);
  const double r = radius * std::sqrt(unit_double(mix64(h + kGolden)));
  return r * unit_circle(angle);
}

}  // namespace cmv
