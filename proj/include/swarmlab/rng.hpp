#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <random>

namespace swarmlab {

// All simulation randomness flows through this wrapper. The engine is
// std::mt19937_64 (bit-exact across platforms by the C++ standard); the
// distribution helpers are hand-rolled because the standard-library
// distribution algorithms are implementation-defined, which would break the
// replay-determinism contract across toolchains.
//
// Every helper consumes exactly one engine draw. The per-event draw order is
// documented in engine.hpp; policy draw order in policy.hpp.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform index in [0, n), n >= 1. Multiply-high mapping: single draw,
    // bias O(n / 2^64), negligible for any set size this simulator sees.
    std::size_t uniform_index(std::size_t n) {
        assert(n >= 1);
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Exponential with the given rate; rate > 0. Never returns inf: the
    // uniform draw lies in [0, 1) so -log1p(-u) <= 53 log 2.
    double exponential(double rate) {
        assert(rate > 0);
        return -std::log1p(-uniform01()) / rate;
    }

    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::mt19937_64 eng_;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Stream seed for replication r of a run with the given root seed.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
    return splitmix64(root ^ splitmix64(stream * 0x9E3779B97F4A7C15ull + 1));
}

}  // namespace swarmlab
