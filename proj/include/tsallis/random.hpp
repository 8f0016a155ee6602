#pragma once

#include <cstdint>
#include <random>

namespace tsallis {

using Rng = std::mt19937_64;

// Sub-streams drawn from one episode seed.
enum class Stream : std::uint64_t {
  kLearner = 0,
  kEnvironment = 1,
  kAttack = 2,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed splitting rule used everywhere: child = splitmix64(parent + (index+1)*phi)
// where phi = 0x9E3779B97F4A7C15. Results never depend on thread count.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index);

Rng make_stream(std::uint64_t episode_seed, Stream stream);

// Uniform double on [0, 1) from the top 53 bits; identical on every platform,
// unlike std::uniform_real_distribution.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace tsallis
