#pragma once

#include <cmath>
#include <cstdint>

namespace cemax {

// Counter-based generator: every gain is a pure function of (seed, k, n),
// so matrices reproduce bit-exactly regardless of sampling order or
// platform. The mixer is SplitMix64 (Steele, Lea, Flood 2014), fixed here
// as part of the file-format contract.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Uniform in the open interval (0,1): 53 mantissa bits, offset by half an ulp
/// so 0 and 1 are never produced.
inline double bits_to_unit_open(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Unit-mean exponential draw for stream element (k, n) of the given seed.
inline double unit_exponential(std::uint64_t seed, std::uint64_t k, std::uint64_t n) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ (0x9E3779B97F4A7C15ULL * (k + 1)));
  h = splitmix64(h ^ (0xBF58476D1CE4E5B9ULL * (n + 1)));
  return -std::log(bits_to_unit_open(h));
}

}  // namespace cemax
