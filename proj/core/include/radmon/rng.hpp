#pragma once

#include <cstdint>
#include <random>

namespace radmon {

// splitmix64; used to derive independent seeds for sub-streams so that
// per-frame / per-recording generators stay reproducible no matter how the
// work is chunked.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t seed, uint64_t a) {
  return splitmix64(seed ^ splitmix64(a));
}

inline uint64_t derive_seed(uint64_t seed, uint64_t a, uint64_t b) {
  return derive_seed(derive_seed(seed, a), b);
}

inline uint64_t derive_seed(uint64_t seed, uint64_t a, uint64_t b, uint64_t c) {
  return derive_seed(derive_seed(seed, a, b), c);
}

using Rng = std::mt19937_64;

// Deterministic value in [-1, 1] for a given id, stable across runs.
inline double signed_unit(uint64_t seed, uint64_t id) {
  const uint64_t h = derive_seed(seed, id);
  return static_cast<double>(h >> 11) / static_cast<double>(1ULL << 53) * 2.0 - 1.0;
}

}  // namespace radmon
