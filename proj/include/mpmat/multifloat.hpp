#pragma once
#include "eft.hpp"
#include "errors.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <span>
#include <string>
#include <string_view>

// Multi-component extended precision: a value is an unevaluated sum of K
// binary64 components in renormalized form (non-overlapping, decreasing
// magnitude, |c[i+1]| <= 1/2 ulp(c[i]), trailing zeros allowed). K=2 gives
// 106 significand bits (DD), K=3 gives 159 (TD), K=4 gives 212 (QD).
// NaN/inf propagate in c[0] with the tail zeroed.
//
// The double-word paths use the classical proven algorithms; TD and QD go
// through an expansion kernel (VecSum + error-branch extraction) in the
// style of CAMPARY. All operations assume round-to-nearest-even and a
// build without FP contraction.

namespace mpmat {

namespace detail {

// Backward TwoSum sweep; preserves the exact sum of t[0..n) and leaves
// t[0] dominant with residuals behind it.
inline void vec_sum(double* t, int n) {
    double s = t[n - 1];
    for (int i = n - 2; i >= 0; --i) {
        auto [hi, lo] = two_sum(t[i], s);
        s = hi;
        t[i + 1] = lo;
    }
    t[0] = s;
}

// VecSumErrBranch: extract up to K components from a dominant-first term
// sequence. Dropped residue rounds the value at the K*53-bit place.
template <int K>
inline std::array<double, K> extract_components(const double* t, int n) {
    std::array<double, K> out{};
    double acc = t[0];
    int j = 0;
    for (int i = 1; i < n; ++i) {
        auto [hi, lo] = two_sum(acc, t[i]);
        if (lo == 0.0) {
            acc = hi;
            continue;
        }
        out[j++] = hi;
        acc = lo;
        if (j == K) return out;
    }
    if (j < K) out[j] = acc;
    return out;
}

// Insertion sort by decreasing |value| with a bit-pattern tiebreak, so
// symmetric call sites produce identical sequences (this is what makes
// + and * bitwise commutative).
inline void canonical_order(double* t, int n) {
    for (int i = 1; i < n; ++i) {
        double v = t[i];
        double av = std::fabs(v);
        int j = i - 1;
        while (j >= 0 && (std::fabs(t[j]) < av ||
                          (std::fabs(t[j]) == av && std::bit_cast<std::uint64_t>(t[j]) >
                                                        std::bit_cast<std::uint64_t>(v)))) {
            t[j + 1] = t[j];
            --j;
        }
        t[j + 1] = v;
    }
}

inline double ulp_of(double x) {
    if (x == 0.0 || !std::isfinite(x)) return 0.0;
    return std::scalbn(1.0, std::ilogb(x) - 52);
}

// renormalized-form invariants on a raw component array
template <int K>
inline bool components_renormalized(const std::array<double, K>& c) {
    if (!std::isfinite(c[0])) {
        for (int i = 1; i < K; ++i)
            if (c[i] != 0.0) return false;
        return true;
    }
    for (int i = 0; i + 1 < K; ++i) {
        if (c[i] == 0.0) {
            if (c[i + 1] != 0.0) return false;
            continue;
        }
        if (std::fabs(c[i + 1]) > 0.5 * ulp_of(c[i])) return false;
    }
    return true;
}

// Exact zero test for a small term sum, via Shewchuk grow-expansion.
// Used by debug checks; never on a hot path.
inline bool expansion_sum_is_zero(const double* t, int n) {
    double h[24];
    int hn = 0;
    for (int i = 0; i < n; ++i) {
        double q = t[i];
        int wn = 0;
        for (int j = 0; j < hn; ++j) {
            auto [s, e] = two_sum(q, h[j]);
            q = s;
            if (e != 0.0 && wn < 24) h[wn++] = e;
        }
        if (q != 0.0 && wn < 24) h[wn++] = q;
        hn = wn;
    }
    return hn == 0;
}

} // namespace detail

template <int K>
class MultiFloat {
    static_assert(K >= 2 && K <= 4, "supported formats: DD, TD, QD");

    std::array<double, K> c_{};

    static constexpr int max_terms = 2 * K * K + K;

public:
    static constexpr int components = K;
    static constexpr int significand_bits = 53 * K;

    constexpr MultiFloat() = default;

    // Exact embedding of a binary64 value.
    constexpr explicit MultiFloat(double x) : c_{} { c_[0] = x; }

    double component(int i) const { return c_[static_cast<std::size_t>(i)]; }
    double hi() const { return c_[0]; }

    // For renormalized values this equals fl(sum of all components).
    double to_double() const { return c_[0]; }

    static MultiFloat from_components_unchecked(const std::array<double, K>& c) {
        MultiFloat r;
        r.c_ = c;
        return r;
    }

    // Renormalizes an arbitrary finite expansion (any order, any overlap)
    // into canonical form; value changes by at most half a unit in the
    // K*53-bit last place. Accepts up to 16 terms.
    static MultiFloat renormalize(std::span<const double> terms) {
        if (terms.size() > 16) throw param_error("renormalize: too many terms");
        double buf[16] = {};
        int n = 0;
        double probe = 0.0;
        for (double v : terms) {
            probe += v;
            if (v != 0.0) buf[n++] = v;
        }
        if (!std::isfinite(probe)) return non_finite(probe);
        if (n == 0) return MultiFloat{};
        detail::vec_sum(buf, n);
        if (n > 1) detail::vec_sum(buf, n);
        return from_expansion(buf, n);
    }

    bool is_zero() const { return c_[0] == 0.0; }
    bool is_finite() const { return std::isfinite(c_[0]); }

    friend MultiFloat operator-(const MultiFloat& x) {
        MultiFloat r;
        for (int i = 0; i < K; ++i) r.c_[i] = x.c_[i] == 0.0 ? 0.0 : -x.c_[i];
        return r;
    }

    friend MultiFloat operator+(const MultiFloat& x, const MultiFloat& y) {
        if constexpr (K == 2) {
            // accurate double-word addition (3u^2 bound)
            SumPair s = two_sum(x.c_[0], y.c_[0]);
            SumPair t = two_sum(x.c_[1], y.c_[1]);
            double c = s.e + t.s;
            SumPair v = detail::fast_two_sum(s.s, c);
            double w = t.e + v.e;
            SumPair r = detail::fast_two_sum(v.s, w);
            return from_pair(r);
        } else {
            double m[2 * K];
            merge_components(x.c_.data(), K, y.c_.data(), K, m);
            return sum_ordered(m, 2 * K);
        }
    }

    friend MultiFloat operator-(const MultiFloat& x, const MultiFloat& y) { return x + (-y); }

    friend MultiFloat operator+(const MultiFloat& x, double y) {
        if constexpr (K == 2) {
            SumPair s = two_sum(x.c_[0], y);
            double v = x.c_[1] + s.e;
            return from_pair(detail::fast_two_sum(s.s, v));
        } else {
            double m[K + 1];
            merge_components(x.c_.data(), K, &y, 1, m);
            return sum_ordered(m, K + 1);
        }
    }
    friend MultiFloat operator+(double x, const MultiFloat& y) { return y + x; }
    friend MultiFloat operator-(const MultiFloat& x, double y) { return x + (-y); }
    friend MultiFloat operator-(double x, const MultiFloat& y) { return (-y) + x; }

    friend MultiFloat operator*(const MultiFloat& x, const MultiFloat& y) {
        if constexpr (K == 2) {
            ProdPair c = two_prod(x.c_[0], y.c_[0]);
            SumPair cross = two_sum(x.c_[0] * y.c_[1], x.c_[1] * y.c_[0]);
            double tail = c.e + (cross.s + (x.c_[1] * y.c_[1] + cross.e));
            return from_pair(detail::fast_two_sum(c.p, tail));
        } else {
            // exact partial products through level i+j = K-1, plain products
            // at level K; deeper levels sit below the target precision
            double terms[max_terms];
            int n = 0;
            for (int i = 0; i < K; ++i) {
                for (int j = 0; j + i < K; ++j) {
                    ProdPair p = two_prod(x.c_[i], y.c_[j]);
                    terms[n++] = p.p;
                    terms[n++] = p.e;
                }
            }
            for (int i = 1; i < K; ++i) terms[n++] = x.c_[i] * y.c_[K - i];
            detail::canonical_order(terms, n);
            return sum_ordered(terms, n);
        }
    }

    friend MultiFloat operator*(const MultiFloat& x, double y) {
        if constexpr (K == 2) {
            ProdPair c = two_prod(x.c_[0], y);
            double tail = std::fma(x.c_[1], y, c.e);
            return from_pair(detail::fast_two_sum(c.p, tail));
        } else {
            double terms[2 * K];
            int n = 0;
            for (int i = 0; i < K; ++i) {
                ProdPair p = two_prod(x.c_[i], y);
                terms[n++] = p.p;
                terms[n++] = p.e;
            }
            detail::canonical_order(terms, n);
            return sum_ordered(terms, n);
        }
    }
    friend MultiFloat operator*(double x, const MultiFloat& y) { return y * x; }

    // Long division with K+1 quotient corrections. Division by exact zero
    // produces the IEEE inf/NaN condition in the leading component.
    friend MultiFloat operator/(const MultiFloat& x, const MultiFloat& y) {
        if (y.c_[0] == 0.0 || !std::isfinite(y.c_[0]) || !std::isfinite(x.c_[0])) {
            return non_finite(x.c_[0] / y.c_[0]);
        }
        double q[K + 1];
        int nq = 0;
        MultiFloat r = x;
        for (int step = 0; step <= K; ++step) {
            double qi = r.c_[0] / y.c_[0];
            if (!std::isfinite(qi)) return non_finite(qi);
            if (qi == 0.0) break;
            q[nq++] = qi;
            if (step < K) r = r - y * qi;
        }
        if (nq == 0) return MultiFloat{};
        return sum_ordered(q, nq);
    }
    friend MultiFloat operator/(const MultiFloat& x, double y) { return x / MultiFloat(y); }
    friend MultiFloat operator/(double x, const MultiFloat& y) { return MultiFloat(x) / y; }

    // Cheaper addition without the merge pass: component-wise TwoSums and a
    // single carry sweep. Weaker worst-case bound under heavy cancellation;
    // kept for speed comparisons.
    static MultiFloat add_sloppy(const MultiFloat& x, const MultiFloat& y) {
        double t[K + 1];
        double carry = 0.0;
        for (int i = 0; i < K; ++i) {
            SumPair p = two_sum(x.c_[i], y.c_[i]);
            SumPair q = two_sum(p.s, carry);
            t[i] = q.s;
            carry = q.e + p.e;
        }
        t[K] = carry;
        return sum_ordered(t, K + 1);
    }

    MultiFloat& operator+=(const MultiFloat& y) { return *this = *this + y; }
    MultiFloat& operator-=(const MultiFloat& y) { return *this = *this - y; }
    MultiFloat& operator*=(const MultiFloat& y) { return *this = *this * y; }
    MultiFloat& operator/=(const MultiFloat& y) { return *this = *this / y; }
    MultiFloat& operator+=(double y) { return *this = *this + y; }
    MultiFloat& operator-=(double y) { return *this = *this - y; }
    MultiFloat& operator*=(double y) { return *this = *this * y; }

    // Component-wise lexicographic comparison is a total order on
    // renormalized finite values.
    friend bool operator==(const MultiFloat& x, const MultiFloat& y) { return x.c_ == y.c_; }
    friend std::partial_ordering operator<=>(const MultiFloat& x, const MultiFloat& y) {
        for (int i = 0; i < K; ++i) {
            if (x.c_[i] < y.c_[i]) return std::partial_ordering::less;
            if (x.c_[i] > y.c_[i]) return std::partial_ordering::greater;
            if (x.c_[i] != y.c_[i]) return std::partial_ordering::unordered;
        }
        return std::partial_ordering::equivalent;
    }

    friend MultiFloat abs(const MultiFloat& x) {
        return std::signbit(x.c_[0]) ? -x : x;
    }

    // K hexadecimal literals separated by single spaces; bit-exact round-trip.
    std::string to_hex_string() const {
        char buf[40];
        std::string out;
        for (int i = 0; i < K; ++i) {
            if (i) out += ' ';
            std::snprintf(buf, sizeof buf, "%a", c_[i]);
            out += buf;
        }
        return out;
    }

    static std::optional<MultiFloat> from_hex_string(std::string_view text) {
        std::string tmp(text);
        std::array<double, K> c{};
        char* cursor = tmp.data();
        for (int i = 0; i < K; ++i) {
            char* next = nullptr;
            c[static_cast<std::size_t>(i)] = std::strtod(cursor, &next);
            if (next == cursor) return std::nullopt;
            cursor = next;
        }
        while (*cursor == ' ' || *cursor == '\t') ++cursor;
        if (*cursor != '\0') return std::nullopt;
        MultiFloat r;
        r.c_ = c;
        return r;
    }

private:
    static MultiFloat non_finite(double head) {
        MultiFloat r;
        r.c_[0] = head;
        return r;
    }

    // Sweeps adjacent pairs until each is a Fast2Sum fixpoint, i.e.
    // fl(c[i] + c[i+1]) == c[i], which is the |c[i+1]| <= 1/2 ulp(c[i])
    // condition. Value-preserving; makes the canonical form stable under
    // re-renormalization (bit-exact idempotence).
    static void strict_normalize(std::array<double, K>& c) {
        for (int pass = 0; pass < 2 * K; ++pass) {
            int w = 0; // compact interior zeros, keeping order
            for (int i = 0; i < K; ++i)
                if (c[i] != 0.0) c[w++] = c[i];
            for (int i = w; i < K; ++i) c[i] = 0.0;
            bool changed = false;
            for (int i = w - 2; i >= 0; --i) {
                SumPair r = detail::fast_two_sum(c[i], c[i + 1]);
                if (r.s != c[i] || r.e != c[i + 1]) {
                    c[i] = r.s;
                    c[i + 1] = r.e;
                    changed = true;
                }
            }
            if (!changed) break;
        }
        for (int i = 0; i < K; ++i)
            if (c[i] == 0.0) c[i] = 0.0; // clear -0
    }

    static MultiFloat from_pair(SumPair p) {
        if (!std::isfinite(p.s)) return non_finite(p.s);
        p = detail::fast_two_sum(p.s, p.e); // exact residual: pair fixpoint
        MultiFloat r;
        r.c_[0] = p.s == 0.0 ? 0.0 : p.s;
        r.c_[1] = (p.e == 0.0 || p.s == 0.0) ? 0.0 : p.e;
        assert(detail::components_renormalized<K>(r.c_));
        return r;
    }

    static MultiFloat from_expansion(const double* t, int n) {
        MultiFloat r;
        r.c_ = detail::extract_components<K>(t, n);
        strict_normalize(r.c_);
        if (r.c_[0] == 0.0 || !std::isfinite(r.c_[0])) return non_finite(r.c_[0] + 0.0);
        assert(detail::components_renormalized<K>(r.c_));
        return r;
    }

    // One VecSum pass then extraction; for term sequences already ordered
    // by roughly decreasing magnitude.
    static MultiFloat sum_ordered(const double* t, int n) {
        double probe = 0.0;
        for (int i = 0; i < n; ++i) probe += t[i];
        if (!std::isfinite(probe)) return non_finite(probe);
        double buf[max_terms > 16 ? max_terms : 16] = {};
        int m = 0;
        for (int i = 0; i < n; ++i)
            if (t[i] != 0.0) buf[m++] = t[i];
        if (m == 0) return MultiFloat{};
        detail::vec_sum(buf, m);
        return from_expansion(buf, m);
    }

    // Merge two magnitude-decreasing arrays into one decreasing sequence;
    // bit-pattern tiebreak keeps merge(x,y) identical to merge(y,x).
    static void merge_components(const double* a, int na, const double* b, int nb, double* out) {
        auto before = [](double x, double y) {
            double ax = std::fabs(x), ay = std::fabs(y);
            if (ax != ay) return ax > ay;
            return std::bit_cast<std::uint64_t>(x) <= std::bit_cast<std::uint64_t>(y);
        };
        int i = 0, j = 0, k = 0;
        while (i < na && j < nb) out[k++] = before(a[i], b[j]) ? a[i++] : b[j++];
        while (i < na) out[k++] = a[i++];
        while (j < nb) out[k++] = b[j++];
    }
};

using DoubleDouble = MultiFloat<2>;
using TripleDouble = MultiFloat<3>;
using QuadDouble = MultiFloat<4>;

// True when the component array satisfies the renormalized-form invariants
// (used by tests; arithmetic results are also asserted in debug builds).
template <int K>
bool is_renormalized(const MultiFloat<K>& x) {
    std::array<double, K> c;
    for (int i = 0; i < K; ++i) c[static_cast<std::size_t>(i)] = x.component(i);
    return detail::components_renormalized<K>(c);
}

} // namespace mpmat
