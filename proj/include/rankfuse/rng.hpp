// SPDX-License-Identifier: Apache-2.0
#ifndef RANKFUSE_RNG_HPP_
#define RANKFUSE_RNG_HPP_

#include <cstdint>
#include <random>

namespace rankfuse {

// std::mt19937_64 produces a standardized bit-exact sequence, but the standard
// <random> distributions do not. Every draw here goes through these manual
// mappings so identical seeds give identical streams on every platform.

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 step over (seed, stream)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Uniform double in [0, 1) from the engine's top 53 bits.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n); n must be positive. Rejection-free modulo is
/// acceptable here: n is tiny relative to 2^64 so the bias is unobservable
/// and, more importantly, the sequence stays deterministic.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  return rng() % n;
}

}  // namespace rankfuse

#endif  // RANKFUSE_RNG_HPP_
