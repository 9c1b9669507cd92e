// rng.hpp
// Seeded RNG utilities. Independent Monte-Carlo trials draw from streams
// derived with a splittable counter scheme: stream(master, i) hashes
// (master, i) through SplitMix64, so trial i sees the same bits no matter
// how trials are distributed over threads.

#pragma once

#include <cstdint>
#include <random>

namespace cbqc {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Per-trial stream derived from a master seed and a counter.
inline Rng derive_stream(std::uint64_t master_seed, std::uint64_t counter) {
    return Rng(splitmix64(splitmix64(master_seed) ^ counter));
}

// Normal sample truncated at +/- 3 sigma (resampled until inside).
inline double truncated_normal(Rng& rng, double mean, double sigma) {
    if (sigma == 0.0) return mean;
    std::normal_distribution<double> dist(mean, sigma);
    for (;;) {
        double x = dist(rng);
        if (x >= mean - 3.0 * sigma && x <= mean + 3.0 * sigma) return x;
    }
}

}  // namespace cbqc
