#pragma once

// Deterministic seeding: a master seed fans out to per-(role, trial, block)
// streams via splitmix64 so parallel work never shares generator state.

#include <cstdint>
#include <random>
#include <string_view>

#include "polarkey/bitvec.hpp"

namespace polarkey {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

// stream seed = sm64(sm64(sm64(master ^ fnv(role)) ^ trial) ^ block)
inline std::mt19937_64 make_stream(uint64_t master, std::string_view role,
                                   uint64_t trial = 0, uint64_t block = 0) {
  uint64_t s = splitmix64(master ^ fnv1a64(role));
  s = splitmix64(s ^ trial);
  s = splitmix64(s ^ block);
  return std::mt19937_64(s);
}

// Uniform double in [0,1) built from the top 53 bits; identical across
// standard libraries, unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& rng) {
  return (rng() >> 11) * 0x1.0p-53;
}

inline BitVec random_bits(size_t n, std::mt19937_64& rng) {
  BitVec v(n);
  for (size_t i = 1; i <= n; ++i)
    if (rng() & 1u) v.set(i, 1);
  return v;
}

}  // namespace polarkey
