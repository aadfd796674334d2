#pragma once

// Seedable 64-bit generator with one independent stream per replication.

#include <cmath>
#include <cstdint>
#include <limits>

namespace qmax {

inline constexpr std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of replication `index` under base seed `seed`.
inline constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index)
{
    std::uint64_t a = seed;
    std::uint64_t h = splitmix64(a);
    std::uint64_t b = h ^ (index * 0xd1b54a32d192ed03ULL);
    return splitmix64(b);
}

/// xoshiro256** (Blackman and Vigna). Satisfies UniformRandomBitGenerator.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed = 0) { reseed(seed); }

    void reseed(std::uint64_t seed)
    {
        std::uint64_t sm = seed;
        for (auto& word : state_)
            word = splitmix64(sm);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()()
    {
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

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// One uniform per draw, as `rand() < prob`.
    bool bernoulli(double prob) { return uniform() < prob; }

    double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4]{};
};

inline Xoshiro256 make_stream(std::uint64_t seed, std::uint64_t index) { return Xoshiro256(stream_seed(seed, index)); }

} // namespace qmax
