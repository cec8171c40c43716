#pragma once
#include "gemm.hpp"
#include "ozaki.hpp"

#include <cstddef>
#include <vector>

// Blocked right-looking LU with partial pivoting. The K x K panel (plus
// the rows below it) is always factored with straight long-precision
// elimination; only the rank-K trailing update A22 -= L21 * U12 is routed
// through the selected GEMM path.

namespace mpmat {

enum class GemmPath { simple, strassen, ozaki };

struct GemmChoice {
    GemmPath path = GemmPath::simple;
    int split_count = 6;      // ozaki
    std::size_t cutoff = 32;  // strassen
    GemmBackend backend;      // ozaki; reference_backend() when empty
};

template <int K>
struct LuFactors {
    DenseMatrix<MultiFloat<K>> lu;  // unit-lower L below the diagonal, U on/above
    std::vector<std::size_t> pivots; // row swapped with row k at step k
    std::size_t panel_width = 0;
};

namespace detail {

// Partial-pivoting elimination on columns [j0, j0+w) with row swaps applied
// across the full matrix; pivots[j0..j0+w) records the swaps.
template <int K>
void panel_factor(DenseMatrix<MultiFloat<K>>& a, std::vector<std::size_t>& pivots,
                  std::size_t j0, std::size_t w) {
    const std::size_t n = a.rows();
    for (std::size_t k = j0; k < j0 + w; ++k) {
        std::size_t piv = k;
        MultiFloat<K> best = abs(a(k, k));
        for (std::size_t r = k + 1; r < n; ++r) {
            MultiFloat<K> cand = abs(a(r, k));
            if (cand > best) {
                best = cand;
                piv = r;
            }
        }
        if (best.is_zero()) throw singular_error("lu: zero pivot column");
        pivots[k] = piv;
        if (piv != k)
            for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(k, j), a(piv, j));
        for (std::size_t r = k + 1; r < n; ++r) {
            if (a(r, k).is_zero()) continue;
            MultiFloat<K> mult = a(r, k) / a(k, k);
            a(r, k) = mult;
            for (std::size_t j = k + 1; j < j0 + w; ++j) a(r, j) -= mult * a(k, j);
        }
    }
}

// U12 := L11^-1 * A12 (unit lower triangular solve), in place.
template <int K>
void panel_u12(DenseMatrix<MultiFloat<K>>& a, std::size_t j0, std::size_t w) {
    const std::size_t n = a.cols();
    for (std::size_t r = j0 + 1; r < j0 + w; ++r)
        for (std::size_t t = j0; t < r; ++t) {
            const MultiFloat<K>& l = a(r, t);
            if (l.is_zero()) continue;
            for (std::size_t j = j0 + w; j < n; ++j) a(r, j) -= l * a(t, j);
        }
}

} // namespace detail

// Unblocked elimination (the panel kernel applied to the whole matrix).
template <int K>
LuFactors<K> unblocked_lu(const DenseMatrix<MultiFloat<K>>& a) {
    if (a.rows() != a.cols()) throw shape_error("lu: matrix must be square");
    LuFactors<K> f{a, std::vector<std::size_t>(a.rows()), a.rows()};
    detail::panel_factor(f.lu, f.pivots, 0, a.rows());
    return f;
}

template <int K>
LuFactors<K> blocked_lu(const DenseMatrix<MultiFloat<K>>& a, std::size_t panel,
                        const GemmChoice& gemm = {}) {
    const std::size_t n = a.rows();
    if (a.rows() != a.cols()) throw shape_error("lu: matrix must be square");
    if (panel < 1 || panel > n) throw param_error("lu: panel width must be in [1, n]");

    LuFactors<K> f{a, std::vector<std::size_t>(n), panel};
    auto& w = f.lu;

    for (std::size_t j0 = 0; j0 < n; j0 += panel) {
        const std::size_t pw = std::min(panel, n - j0); // last panel may shrink
        detail::panel_factor(w, f.pivots, j0, pw);
        if (j0 + pw == n) break;
        detail::panel_u12(w, j0, pw);

        const std::size_t tm = n - j0 - pw; // trailing size
        DenseMatrix<MultiFloat<K>> l21(tm, pw), u12(pw, tm);
        for (std::size_t i = 0; i < tm; ++i)
            for (std::size_t j = 0; j < pw; ++j) l21(i, j) = w(j0 + pw + i, j0 + j);
        for (std::size_t i = 0; i < pw; ++i)
            for (std::size_t j = 0; j < tm; ++j) u12(i, j) = w(j0 + i, j0 + pw + j);

        DenseMatrix<MultiFloat<K>> update(tm, tm);
        switch (gemm.path) {
        case GemmPath::simple:
            update = gemm_simple(l21, u12);
            break;
        case GemmPath::strassen:
            update = strassen(l21, u12, gemm.cutoff);
            break;
        case GemmPath::ozaki: {
            const GemmBackend& be = gemm.backend ? gemm.backend : reference_backend();
            update = ozaki_gemm(l21, u12, gemm.split_count, be).first;
            break;
        }
        }
        for (std::size_t i = 0; i < tm; ++i)
            for (std::size_t j = 0; j < tm; ++j)
                w(j0 + pw + i, j0 + pw + j) -= update(i, j);
    }
    return f;
}

// Lower-triangular solve L y = b (divides by the diagonal; L = I gives y = b).
template <int K>
std::vector<MultiFloat<K>> forward_sub(const DenseMatrix<MultiFloat<K>>& l,
                                       const std::vector<MultiFloat<K>>& b) {
    const std::size_t n = l.rows();
    if (l.cols() != n || b.size() != n) throw shape_error("forward_sub: shape mismatch");
    std::vector<MultiFloat<K>> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (l(i, i).is_zero()) throw singular_error("forward_sub: zero diagonal");
        MultiFloat<K> acc = b[i];
        for (std::size_t j = 0; j < i; ++j) acc -= l(i, j) * y[j];
        y[i] = acc / l(i, i);
    }
    return y;
}

// Upper-triangular solve U x = y.
template <int K>
std::vector<MultiFloat<K>> backward_sub(const DenseMatrix<MultiFloat<K>>& u,
                                        const std::vector<MultiFloat<K>>& y) {
    const std::size_t n = u.rows();
    if (u.cols() != n || y.size() != n) throw shape_error("backward_sub: shape mismatch");
    std::vector<MultiFloat<K>> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        if (u(ii, ii).is_zero()) throw singular_error("backward_sub: zero diagonal");
        MultiFloat<K> acc = y[ii];
        for (std::size_t j = ii + 1; j < n; ++j) acc -= u(ii, j) * x[j];
        x[ii] = acc / u(ii, ii);
    }
    return x;
}

template <int K>
std::vector<MultiFloat<K>> apply_pivots(const LuFactors<K>& f,
                                        const std::vector<MultiFloat<K>>& b) {
    std::vector<MultiFloat<K>> pb = b;
    for (std::size_t k = 0; k < f.pivots.size(); ++k)
        if (f.pivots[k] != k) std::swap(pb[k], pb[f.pivots[k]]);
    return pb;
}

// Row permutation as an index sequence: row i of PA is row perm[i] of A.
template <int K>
std::vector<std::size_t> permutation_vector(const LuFactors<K>& f) {
    std::vector<std::size_t> perm(f.pivots.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    for (std::size_t k = 0; k < f.pivots.size(); ++k)
        if (f.pivots[k] != k) std::swap(perm[k], perm[f.pivots[k]]);
    return perm;
}

template <int K>
std::vector<MultiFloat<K>> lu_solve_factored(const LuFactors<K>& f,
                                             const std::vector<MultiFloat<K>>& b) {
    const std::size_t n = f.lu.rows();
    std::vector<MultiFloat<K>> y = apply_pivots(f, b);
    // unit-lower forward pass on the combined factors
    for (std::size_t i = 0; i < n; ++i) {
        MultiFloat<K> acc = y[i];
        for (std::size_t j = 0; j < i; ++j) acc -= f.lu(i, j) * y[j];
        y[i] = acc;
    }
    return backward_sub(f.lu, y);
}

template <int K>
std::vector<MultiFloat<K>> lu_solve(const DenseMatrix<MultiFloat<K>>& a,
                                    const std::vector<MultiFloat<K>>& b, std::size_t panel,
                                    const GemmChoice& gemm = {}) {
    return lu_solve_factored(blocked_lu(a, panel, gemm), b);
}

} // namespace mpmat
