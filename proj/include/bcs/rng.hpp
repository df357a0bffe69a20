#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace bcs {

// splitmix64 finalizer; used as a cheap, well-mixed hash for seed derivation.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Counter-based stream derivation: a master seed plus a list of stream ids
// (component tag, grid index, trial index, ...) maps to an independent seed.
// Identical inputs give identical seeds regardless of scheduling, which keeps
// parallel sweeps reproducible.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> ids) {
  std::uint64_t h = mix64(master);
  for (std::uint64_t id : ids) h = mix64(h ^ mix64(id));
  return h;
}

// Unbiased draw from {0, 1, ..., bound-1} via rejection.
inline std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t bound) {
  const std::uint64_t rmax = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = rmax - rmax % bound;
  std::uint64_t r;
  do {
    r = gen();
  } while (r >= limit);
  return r % bound;
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace bcs
