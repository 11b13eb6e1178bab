#pragma once

// Portable seeded randomness. std::uniform_*_distribution results differ
// between standard libraries, so bounded integers and unit reals are drawn
// here directly from mt19937_64 output to keep runs reproducible everywhere.

#include <cstdint>
#include <limits>
#include <random>

namespace qsplit {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent stream seed for (seed, stream) pairs.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return splitmix64(splitmix64(seed) ^ (stream * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL));
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream) { return Rng(derive_seed(seed, stream)); }

/// Uniform integer in [0, bound), bound >= 1. Rejection sampling, no modulo bias.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

/// Uniform real in [0, 1).
inline double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline int random_spin(Rng& rng) { return (rng() >> 63) ? 1 : -1; }

// Stream identifiers used across the library.
namespace streams {
inline constexpr std::uint64_t kInitialState = 1;
inline constexpr std::uint64_t kPermutation = 2;
inline constexpr std::uint64_t kSamplerCall = 3;
inline constexpr std::uint64_t kSubset = 4;
inline constexpr std::uint64_t kAnnealRead = 5;
inline constexpr std::uint64_t kRegularization = 6;
} // namespace streams

} // namespace qsplit
