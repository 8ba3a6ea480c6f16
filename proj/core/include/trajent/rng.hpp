#pragma once

#include <cstdint>
#include <random>

namespace trajent {

/// splitmix64 step; the standard finalizer-based mixer.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Counter-style stream derivation: the (stream, index) pair selects a seed
/// deterministically from the master seed, so execution order of parallel
/// work items cannot change any draw.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                 std::uint64_t index = 0) {
  std::uint64_t s = master;
  std::uint64_t z = splitmix64(s);
  s = z ^ (stream * 0xD1342543DE82EF95ull + 0x2545F4914F6CDD1Dull);
  z = splitmix64(s);
  s = z ^ (index * 0x9E3779B97F4A7C15ull + 0x853C49E6748FEA9Bull);
  return splitmix64(s);
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

}  // namespace trajent
