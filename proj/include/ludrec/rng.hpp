#pragma once

#include <cstdint>
#include <random>

namespace ludrec {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used for every seed derivation in the project.
constexpr std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Independent per-purpose streams of one master seed. The offsets are part
/// of the reproducibility contract: changing them changes every generated
/// instance.
enum class Stream : std::uint64_t {
  kLocations = 1,
  kGraph = 2,
  kCorruption = 3,
  kNoise = 4,
  kChecks = 5,
};

inline Rng MakeStream(std::uint64_t master_seed, Stream stream) {
  return Rng(SplitMix64(master_seed + static_cast<std::uint64_t>(stream)));
}

/// Sub-stream for job `index` of a batch seeded with `seed` (trial k of a
/// sampling check, for instance).
inline Rng MakeSubStream(std::uint64_t seed, std::uint64_t index) {
  return Rng(SplitMix64(SplitMix64(seed) ^ SplitMix64(index + 0x5bd1e995ULL)));
}

}  // namespace ludrec
