#pragma once

#include <cstdint>
#include <random>

namespace gapcomp {

// Derives an independent sub-seed from a base seed and a stream tag
// (splitmix64 finalizer). Used so that parallel sweep cells and pipeline
// stages draw from disjoint, order-independent streams.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t x = base + 0x9e3779b97f4a7c15ull * (stream + 1);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

}  // namespace gapcomp
