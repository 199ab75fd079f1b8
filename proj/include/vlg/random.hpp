#pragma once

#include <cstdint>

namespace vlg {

// xoshiro256** seeded through splitmix64. Output depends only on the seed and
// on unsigned 64-bit arithmetic, so streams match across platforms and
// compilers (std::mt19937 would too, but the std distributions do not).
class xoshiro256ss {
public:
    using result_type = std::uint64_t;

    explicit xoshiro256ss(std::uint64_t seed = 0) {
        for (auto& word : s_)
            word = splitmix64(seed);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform integer in [0, bound) via 128-bit multiply-shift. bound must be > 0.
    std::uint64_t below(std::uint64_t bound) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>((*this)()) * bound) >> 64);
    }

    // Uniform double in [0, 1) built from the top 53 bits.
    double unit() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    static std::uint64_t splitmix64(std::uint64_t& state) {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4];
};

} // namespace vlg
