#ifndef FPKIT_UTIL_RANDOM_H_
#define FPKIT_UTIL_RANDOM_H_

#include <cstdint>
#include <random>

namespace fpkit {

// SplitMix64 finalizer. Used to derive independent sub-seeds (per browser,
// per trial) from one user-facing seed so that work can be split without
// changing results.
constexpr std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

using Rng = std::mt19937_64;

// Uniform double in [0, 1). Implemented by hand so streams are identical
// across standard library implementations.
inline double UniformUnit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, bound). |bound| must be positive.
inline std::uint64_t UniformBelow(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = bound * ((~std::uint64_t{0}) / bound);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

inline bool Bernoulli(Rng& rng, double p) { return UniformUnit(rng) < p; }

}  // namespace fpkit

#endif  // FPKIT_UTIL_RANDOM_H_
