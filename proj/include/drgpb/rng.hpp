// Seeded RNG streams. Each consumer (trajectory sample, Monte Carlo run,
// bootstrap) gets its own engine keyed by (seed, stream), so independent
// streams can be drawn in any order without affecting each other.
#pragma once

#include <cstdint>
#include <random>

namespace drgpb {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Engine for stream `stream` of base seed `seed`. Distinct (seed, stream)
/// pairs yield well-separated sequences.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream = 0) {
    std::uint64_t s = seed ^ (0xD2B74407B1CE6E93ull * (stream + 1));
    std::uint32_t material[8];
    for (int i = 0; i < 4; ++i) {
        std::uint64_t v = splitmix64(s);
        material[2 * i] = static_cast<std::uint32_t>(v);
        material[2 * i + 1] = static_cast<std::uint32_t>(v >> 32);
    }
    std::seed_seq seq(material, material + 8);
    return std::mt19937_64(seq);
}

} // namespace drgpb
