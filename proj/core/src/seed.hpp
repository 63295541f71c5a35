#pragma once

#include <cstdint>

namespace qsyn::detail {

// Independent stream seed for one candidate: splitmix64 over (seed, hash).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t hash) {
  std::uint64_t z = seed ^ (hash + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace qsyn::detail
