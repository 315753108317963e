#pragma once

#include <cstdint>

#include <boost/random/mersenne_twister.hpp>

namespace mopc {

// 64-bit Mersenne Twister; distributions come from Boost.Random.
using Rng = boost::random::mt19937_64;

// SplitMix64 finalizer over (base, stream). One generator per trial.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Uniform double in [0,1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace mopc
