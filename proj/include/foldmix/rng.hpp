#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace foldmix {

// splitmix64 step; also used as the mixing function for substream derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Hash a master seed together with a list of stream identifiers into a
// substream seed. Every component (chain, simulation run, subject draw, ...)
// gets its own stream so results are reproducible and shardable.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> ids) {
    std::uint64_t s = master;
    (void)splitmix64(s);
    for (std::uint64_t id : ids) {
        s ^= id + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
        (void)splitmix64(s);
    }
    return s;
}

// xoshiro256++ generator. Self-contained so draws are bit-identical across
// platforms and standard-library versions.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed = 0) { reseed(seed); }

    void reseed(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on (0,1); never returns 0 or 1, so log() and logit() are safe.
    double uniform() {
        const std::uint64_t bits = next_u64() >> 11;  // 53 bits
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller (cosine branch, no cached state).
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    double exponential() { return -std::log(uniform()); }

    bool bernoulli(double p) { return uniform() < p; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4];
};

}  // namespace foldmix
