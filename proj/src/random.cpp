#include "tsallis/random.hpp"

namespace tsallis {

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
  return splitmix64(parent + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

Rng make_stream(std::uint64_t episode_seed, Stream stream) {
  return Rng(derive_seed(episode_seed, static_cast<std::uint64_t>(stream)));
}

}  // namespace tsallis
