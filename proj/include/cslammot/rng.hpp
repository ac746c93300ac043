#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace cslammot {

using Rng = std::mt19937_64;

/// Mixes a base seed with stream tags so that every (vehicle, step, purpose)
/// draws from its own independent, order-insensitive stream.
inline std::uint64_t deriveSeed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = mix(seed);
  for (auto t : tags) h = mix(h ^ mix(t));
  return h;
}

inline Rng makeRng(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  return Rng(deriveSeed(seed, tags));
}

}  // namespace cslammot
