#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace qrenew {

// SplitMix64 finalizer. Used to derive independent stream keys from (seed, index).
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// xoshiro256** generator. Each trajectory owns one, keyed by (master seed, trajectory index),
/// so results do not depend on how trajectories are scheduled across threads.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& word : state_) {
            s = splitmix64(s);
            word = s;
        }
    }

    static Rng for_stream(std::uint64_t master_seed, std::uint64_t stream) {
        return Rng(splitmix64(master_seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform in the open interval (0, 1).
    double uniform_open() { return (static_cast<double>((*this)() >> 12) + 0.5) * 0x1.0p-52; }

    /// Exponential with the given rate by inversion; strictly positive and finite.
    double exponential(double rate) { return -std::log(uniform_open()) / rate; }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4];
};

}  // namespace qrenew
