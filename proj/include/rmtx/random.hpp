#pragma once

#include <cstdint>
#include <random>

namespace rmtx {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for stream `index` of a master seed. Streams are keyed on the pair,
/// never on execution order, so parallel schedules reproduce serial ones.
[[nodiscard]] constexpr std::uint64_t split_seed(std::uint64_t master,
                                                 std::uint64_t index) noexcept {
  return mix64(mix64(master) ^ mix64(index * 0xd1b54a32d192ed03ULL + 1));
}

[[nodiscard]] inline Rng make_stream(std::uint64_t master, std::uint64_t index) {
  return Rng(split_seed(master, index));
}

}  // namespace rmtx
