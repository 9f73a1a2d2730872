#pragma once

#include <cstdint>
#include <random>

namespace adeff {

using Rng = std::mt19937_64;

// splitmix64; used both to derive independent seed streams and as the
// counter-based generator behind per-(round, expert) loss fixedness.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derive a child seed from a parent seed and a stream tag.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x2545f4914f6cdd1dULL));
}

// Uniform in [0,1) from a counter tuple, independent of evaluation order.
inline double counter_uniform(std::uint64_t seed, std::uint64_t round, std::uint64_t expert) {
    std::uint64_t h = splitmix64(splitmix64(seed ^ 0x6a09e667f3bcc909ULL) + round);
    h = splitmix64(h ^ splitmix64(expert + 0xbb67ae8584caa73bULL));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

} // namespace adeff
