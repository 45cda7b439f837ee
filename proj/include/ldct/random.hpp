#pragma once

#include <cstdint>
#include <random>

namespace ldct {

/// splitmix64 step; used both as a tiny standalone PRNG and as a seed mixer.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Derives an independent stream key from (seed, stream). Two distinct
/// stream ids under the same seed give statistically unrelated keys, so
/// per-entry/per-image substreams can be drawn in any order or in parallel.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64_next(s);
    s = a ^ (stream + 0x9e3779b97f4a7c15ull);
    splitmix64_next(s);
    return splitmix64_next(s);
}

inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream = 0) {
    return std::mt19937_64(derive_stream(seed, stream));
}

} // namespace ldct
