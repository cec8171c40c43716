#pragma once
#include <cassert>
#include <cmath>
#include <utility>

// Error-free transformations on binary64. All routines assume
// round-to-nearest-even and must be compiled without FP contraction
// or reassociation (the build sets -ffp-contract=off).

namespace mpmat {

// s + e == a + b exactly, s == fl(a + b)
struct SumPair {
    double s;
    double e;
};

// p + e == a * b exactly, p == fl(a * b)
struct ProdPair {
    double p;
    double e;
};

// Knuth TwoSum, 6 flops, no magnitude precondition.
inline SumPair two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    double e = (a - (s - bb)) + (b - bb);
    return {s, e};
}

namespace detail {
// Dekker FastTwoSum without the precondition check; used inside kernels
// where |a| >= |b| is not guaranteed but the error term is still benign.
inline SumPair fast_two_sum(double a, double b) {
    double s = a + b;
    double e = b - (s - a);
    return {s, e};
}
} // namespace detail

// Dekker FastTwoSum, 3 flops. Requires |a| >= |b| or a == 0.
inline SumPair quick_two_sum(double a, double b) {
    assert(a == 0.0 || b == 0.0 || std::fabs(a) >= std::fabs(b));
    return detail::fast_two_sum(a, b);
}

// Splits a into hi + lo where both halves fit 26-bit significands,
// so hi*hi, hi*lo, lo*lo are exact. Requires |a| < 2^996.
inline std::pair<double, double> dekker_split(double a) {
    constexpr double splitter = 134217729.0; // 2^27 + 1
    double c = splitter * a;
    double hi = c - (c - a);
    double lo = a - hi;
    return {hi, lo};
}

// TwoProd via fused multiply-add. Exact when a*b neither overflows nor
// loses bits to subnormal underflow.
inline ProdPair two_prod_fma(double a, double b) {
    double p = a * b;
    double e = std::fma(a, b, -p);
    return {p, e};
}

// TwoProd via Dekker splitting; same contract, no FMA required.
inline ProdPair two_prod_dekker(double a, double b) {
    double p = a * b;
    auto [a1, a2] = dekker_split(a);
    auto [b1, b2] = dekker_split(b);
    double e = ((a1 * b1 - p) + a1 * b2 + a2 * b1) + a2 * b2;
    return {p, e};
}

#if defined(__FMA__) || defined(__AVX2__)
#define MPMAT_HAVE_HW_FMA 1
#endif

inline ProdPair two_prod(double a, double b) {
#ifdef MPMAT_HAVE_HW_FMA
    return two_prod_fma(a, b);
#else
    return two_prod_dekker(a, b);
#endif
}

} // namespace mpmat
