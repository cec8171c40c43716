#pragma once
#include <cmath>
#include <cstdint>
#include <numbers>

// Deterministic, platform-independent random streams. xoshiro256** with
// splitmix64 seeding; the integer stream is bit-identical everywhere for a
// fixed seed. Normal variates use the Box-Muller transform on consecutive
// uniform pairs (cosine branch only), so each normal consumes exactly two
// 64-bit draws.

namespace mpmat {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Xoshiro256ss {
    std::uint64_t s_[4];

    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

public:
    explicit Xoshiro256ss(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64_next(sm);
    }

    std::uint64_t next_u64() {
        std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform on [0,1) with 53-bit granularity
    double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1p-53; }

    // standard normal; consumes exactly two draws
    double next_normal() {
        double u1 = next_uniform();
        double u2 = next_uniform();
        double r = std::sqrt(-2.0 * std::log(1.0 - u1));
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }
};

} // namespace mpmat
