#pragma once

#include <cstdint>
#include <random>

namespace hc {

using Rng = std::mt19937_64;

// Counter-based seed derivation: the seed of replicate `index` in stream
// `stream` depends only on (master, stream, index), never on scheduling.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                    std::uint64_t index) noexcept {
    return splitmix64(splitmix64(splitmix64(master) ^ stream) + index);
}

namespace streams {
inline constexpr std::uint64_t data = 1;
inline constexpr std::uint64_t split = 2;
inline constexpr std::uint64_t eval = 3;
inline constexpr std::uint64_t bootstrap = 4;
inline constexpr std::uint64_t replicate = 5;
inline constexpr std::uint64_t conditional = 6;
} // namespace streams

} // namespace hc
