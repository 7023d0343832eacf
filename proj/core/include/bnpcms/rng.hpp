#pragma once

#include <cstdint>
#include <random>

namespace bnpcms {

/// SplitMix64 finalizer; used to derive independent-looking substream seeds
/// from (seed, index) pairs so replicate r of a run is reproducible on its
/// own.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream + 0x9e3779b97f4a7c15ULL));
}

/// Uniform integer in [0, bound) by rejection on raw mt19937_64 output;
/// std::uniform_int_distribution is not bit-stable across standard library
/// implementations, this is.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = (~std::uint64_t{0} / bound) * bound;
    std::uint64_t draw;
    do {
        draw = rng();
    } while (draw >= limit);
    return draw % bound;
}

/// Uniform double in [0, 1) with 53 random bits; bit-stable for the same
/// reason as uniform_below.
inline double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace bnpcms
