#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mpmat/eft.hpp"
#include "mpmat/oracle.hpp"
#include "mpmat/rng.hpp"

#include <bit>
#include <cmath>
#include <cstdint>

using mpmat::dekker_split;
using mpmat::quick_two_sum;
using mpmat::two_prod;
using mpmat::two_prod_dekker;
using mpmat::two_prod_fma;
using mpmat::two_sum;
using mpmat::oracle::BigFloat;

namespace {

// random double with magnitude around 2^e_spread
double random_scaled(mpmat::Xoshiro256ss& rng, int e_spread) {
    double u = rng.next_uniform() - 0.5;
    int e = static_cast<int>(rng.next_u64() % (2 * static_cast<std::uint64_t>(e_spread) + 1)) -
            e_spread;
    return std::scalbn(u, e);
}

// odd significand bit length (trailing zeros stripped)
int significand_bits(double x) {
    if (x == 0.0) return 0;
    std::uint64_t m = std::bit_cast<std::uint64_t>(std::fabs(x)) & ((1ULL << 52) - 1);
    int e = std::ilogb(x);
    if (e >= -1022) m |= 1ULL << 52; // normal: implicit bit
    while ((m & 1) == 0) m >>= 1;
    return 64 - std::countl_zero(m);
}

} // namespace

TEST_CASE("two_sum basics") {
    auto r = two_sum(1.0, 0.0);
    CHECK(r.s == 1.0);
    CHECK(r.e == 0.0);

    r = two_sum(1.0, 0x1p-60);
    CHECK(r.s == 1.0);
    CHECK(r.e == 0x1p-60); // residual carries the non-representable addend
}

TEST_CASE("two_sum exactness against the rational oracle") {
    mpmat::Xoshiro256ss rng(2024);
    for (int i = 0; i < 100000; ++i) {
        double a = random_scaled(rng, 120);
        double b = random_scaled(rng, 120);
        auto [s, e] = two_sum(a, b);
        CHECK(BigFloat(a) + BigFloat(b) == BigFloat(s) + BigFloat(e));
        CHECK(s == a + b);
    }
}

TEST_CASE("quick_two_sum agrees with two_sum on ordered pairs") {
    auto r = quick_two_sum(2.0, 1.0);
    CHECK(r.s == 3.0);
    CHECK(r.e == 0.0);
    r = quick_two_sum(1.0, 0x1p-60);
    CHECK(r.s == 1.0);
    CHECK(r.e == 0x1p-60);

    mpmat::Xoshiro256ss rng(7);
    for (int i = 0; i < 100000; ++i) {
        double a = random_scaled(rng, 60);
        double b = random_scaled(rng, 60);
        if (std::fabs(a) < std::fabs(b)) std::swap(a, b);
        auto q = quick_two_sum(a, b);
        auto t = two_sum(a, b);
        CHECK(q.s == t.s);
        CHECK(q.e == t.e);
    }
}

TEST_CASE("two_prod basics") {
    auto r = two_prod(3.0, 4.0);
    CHECK(r.p == 12.0);
    CHECK(r.e == 0.0);

    r = two_prod(0.0, 123.456);
    CHECK(r.p == 0.0);
    CHECK(r.e == 0.0);

    // (1 + 2^-52)^2 = 1 + 2^-51 + 2^-104: the last term is the residual
    double x = 1.0 + 0x1p-52;
    r = two_prod(x, x);
    CHECK(r.p == 1.0 + 0x1p-51);
    CHECK(r.e == 0x1p-104);
    CHECK(BigFloat(x) * BigFloat(x) == BigFloat(r.p) + BigFloat(r.e));
}

TEST_CASE("two_prod exactness against the rational oracle") {
    mpmat::Xoshiro256ss rng(99);
    for (int i = 0; i < 100000; ++i) {
        double a = random_scaled(rng, 120);
        double b = random_scaled(rng, 120);
        auto [p, e] = two_prod(a, b);
        CHECK(BigFloat(a) * BigFloat(b) == BigFloat(p) + BigFloat(e));
    }
}

TEST_CASE("fma and dekker two_prod agree bit-exactly") {
    mpmat::Xoshiro256ss rng(5150);
    for (int i = 0; i < 1000000; ++i) {
        double a = random_scaled(rng, 200);
        double b = random_scaled(rng, 200);
        auto f = two_prod_fma(a, b);
        auto d = two_prod_dekker(a, b);
        CHECK(f.p == d.p);
        CHECK(f.e == d.e);
    }
}

TEST_CASE("dekker_split") {
    auto [hi, lo] = dekker_split(1.0);
    CHECK(hi == 1.0);
    CHECK(lo == 0.0);

    // the splitter constant itself: top bits 2^27, remainder 1
    auto [h2, l2] = dekker_split(0x1p27 + 1.0);
    CHECK(h2 == 0x1p27);
    CHECK(l2 == 1.0);

    mpmat::Xoshiro256ss rng(31337);
    for (int i = 0; i < 100000; ++i) {
        double a = random_scaled(rng, 300);
        auto [h, l] = dekker_split(a);
        CHECK(h + l == a);
        CHECK(BigFloat(h) + BigFloat(l) == BigFloat(a));
        CHECK(significand_bits(h) <= 26);
        CHECK(significand_bits(l) <= 26);
    }
}

TEST_CASE("overflow reports a non-finite condition") {
    auto r = two_sum(0x1.fffffffffffffp1023, 0x1.fffffffffffffp1023);
    CHECK(!std::isfinite(r.s));
    auto p = two_prod(0x1p600, 0x1p600);
    CHECK(!std::isfinite(p.p));
}
