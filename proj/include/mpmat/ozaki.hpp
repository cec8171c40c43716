#pragma once
#include "backend.hpp"
#include "dense_matrix.hpp"
#include "multifloat.hpp"

#include <cassert>
#include <chrono>
#include <cmath>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

// Error-free splitting of long-precision matrices into binary64 pieces
// whose pairwise products a conforming backend computes without rounding,
// plus reconstruction of the long-precision product from those pieces.
//
// Splitting loop, per piece: take the binary64 image of the working
// matrix, form per-row (or per-column) shift constants
//
//   tau_i = 2^(ceil(log2 mu_i) + ceil((S + log2 l) / 2)),   S = 53,
//
// extract the leading bits of every entry as (image + tau) - tau, and
// subtract the extracted piece from the working matrix in long precision
// (which is exact). Every piece is then an integer multiple of its row's
// grid 2^(ceil(log2 mu_i) + ceil((S + log2 l)/2) - S) with short enough
// significands that length-l dot products of pieces cannot round, in any
// summation order.

namespace mpmat {

enum class SplitSide { rows, cols }; // rows: left factor A, cols: right factor B

// Smallest integer e with 2^e >= x, read from the exponent field.
inline int exponent_ceil_log2(double x) {
    assert(x > 0.0 && std::isfinite(x));
    int e = std::ilogb(x); // floor(log2 x)
    return std::scalbn(1.0, e) == x ? e : e + 1;
}

// ceil((S + log2 l) / 2) for S = 53; integer-exact for all l >= 1.
inline int split_shift_bits(std::size_t inner_dim, int short_bits = 53) {
    assert(inner_dim >= 1);
    int cl = 0;
    while ((std::size_t{1} << cl) < inner_dim) ++cl;
    return (short_bits + cl + 1) / 2;
}

namespace detail {
// (v + tau) - tau evaluated strictly in binary64; the volatile stop keeps
// the compiler from folding the shift away.
inline double shift_extract(double v, double tau) {
    volatile double shifted = v + tau;
    return shifted - tau;
}
} // namespace detail

template <int K>
struct SplitSet {
    std::vector<DenseMatrix<double>> pieces;
    DenseMatrix<MultiFloat<K>> residual; // working matrix after the last extraction
    SplitSide side = SplitSide::rows;
    int split_count = 0;
    int short_bits = 53;
    std::size_t inner_dim = 0;
};

// Splits M into D binary64 pieces. D = 1 degenerates to the leading
// binary64 image with no extraction. For D >= 2 every piece, including the
// last, is extracted through the shift so that all pairwise products in
// the triangular set are error-free; the unextracted long-precision
// residue is returned alongside the pieces.
template <int K>
SplitSet<K> split_matrix(const DenseMatrix<MultiFloat<K>>& m, int d, SplitSide side) {
    if (d < 1) throw param_error("split_matrix: split count must be >= 1");
    for (std::size_t i = 0; i < m.size(); ++i)
        if (!m.data()[i].is_finite()) throw param_error("split_matrix: non-finite entry");

    const std::size_t inner = side == SplitSide::rows ? m.cols() : m.rows();
    const std::size_t outer = side == SplitSide::rows ? m.rows() : m.cols();
    const int sigma = split_shift_bits(inner);

    SplitSet<K> out;
    out.side = side;
    out.split_count = d;
    out.inner_dim = inner;
    out.residual = m;

    if (d == 1) {
        out.pieces.push_back(leading_image(m));
        const DenseMatrix<double>& lead = out.pieces.back();
        for (std::size_t i = 0; i < lead.size(); ++i)
            out.residual.data()[i] -= lead.data()[i];
        return out;
    }

    auto& work = out.residual;
    for (int alpha = 0; alpha < d; ++alpha) {
        DenseMatrix<double> image = leading_image(work);
        DenseMatrix<double> piece(m.rows(), m.cols());
        const std::vector<double> mu =
            side == SplitSide::rows ? mat_max_abs_row(image) : mat_max_abs_col(image);

        std::vector<double> tau(outer, 0.0); // zero marks a skipped row/column
        for (std::size_t o = 0; o < outer; ++o) {
            if (mu[o] == 0.0) continue;
            const int e = exponent_ceil_log2(mu[o]);
            if (e + sigma > 1020) throw param_error("split_matrix: entries too large to shift");
            tau[o] = std::scalbn(1.0, e + sigma);
        }

#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (std::ptrdiff_t oo = 0; oo < static_cast<std::ptrdiff_t>(outer); ++oo) {
            const auto o = static_cast<std::size_t>(oo);
            if (tau[o] == 0.0) continue; // zero row/column: piece stays zero
            for (std::size_t p = 0; p < inner; ++p) {
                const std::size_t i = side == SplitSide::rows ? o : p;
                const std::size_t j = side == SplitSide::rows ? p : o;
                const double x = detail::shift_extract(image(i, j), tau[o]);
                piece(i, j) = x;
                if (x != 0.0) {
                    MultiFloat<K>& w = work(i, j);
#ifndef NDEBUG
                    const MultiFloat<K> before = w;
#endif
                    w -= x;
#ifndef NDEBUG
                    // the piece carries leading bits of w, so the subtraction
                    // must be exact: before - w - x == 0 in exact arithmetic
                    double check[2 * K + 1];
                    for (int t = 0; t < K; ++t) {
                        check[2 * t] = before.component(t);
                        check[2 * t + 1] = -w.component(t);
                    }
                    check[2 * K] = -x;
                    assert(detail::expansion_sum_is_zero(check, 2 * K + 1));
#endif
                }
            }
        }
        out.pieces.push_back(std::move(piece));
    }
    return out;
}

struct OzakiProfile {
    double split_seconds = 0.0;
    double product_seconds = 0.0;
    double accumulate_seconds = 0.0;
    int split_count = 0;

    double total_seconds() const {
        return split_seconds + product_seconds + accumulate_seconds;
    }
    double split_fraction() const { return frac(split_seconds); }
    double product_fraction() const { return frac(product_seconds); }
    double accumulate_fraction() const { return frac(accumulate_seconds); }

private:
    double frac(double v) const {
        double t = total_seconds();
        return t > 0.0 ? v / t : 0.0;
    }
};

// Long-precision product via the splitting: computes C_ab = backend(A_a,
// B_b) for every pair with a + b <= D + 1 (the triangular set, D(D+1)/2
// products) and accumulates them into C with long-precision additions in
// fixed order a = 1..D, b = 1..D-a+1. The products are independent and may
// run concurrently; each element's accumulation order is fixed, so results
// are identical at any thread count.
//
// drop_threshold = 0 keeps every pair of the triangular set. A positive
// value prunes pairs whose magnitude bound max|A_a| * max|B_b| falls below
// the threshold times the leading pair's bound, trading accuracy for
// backend calls.
template <int K>
std::pair<DenseMatrix<MultiFloat<K>>, OzakiProfile>
ozaki_gemm(const DenseMatrix<MultiFloat<K>>& a, const DenseMatrix<MultiFloat<K>>& b, int d,
           const GemmBackend& backend, double drop_threshold = 0.0) {
    if (a.cols() != b.rows()) throw shape_error("ozaki_gemm: inner dimensions differ");
    if (d < 1) throw param_error("ozaki_gemm: split count must be >= 1");
    if (drop_threshold < 0.0) throw param_error("ozaki_gemm: negative drop threshold");

    using clock = std::chrono::steady_clock;
    OzakiProfile prof;
    prof.split_count = d;

    auto t0 = clock::now();
    SplitSet<K> sa = split_matrix(a, d, SplitSide::rows);
    SplitSet<K> sb = split_matrix(b, d, SplitSide::cols);
    auto t1 = clock::now();
    prof.split_seconds = std::chrono::duration<double>(t1 - t0).count();

    auto piece_max = [](const DenseMatrix<double>& p) {
        double m = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) m = std::fmax(m, std::fabs(p.data()[i]));
        return m;
    };
    std::vector<double> amax(static_cast<std::size_t>(d)), bmax(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        amax[static_cast<std::size_t>(i)] = piece_max(sa.pieces[static_cast<std::size_t>(i)]);
        bmax[static_cast<std::size_t>(i)] = piece_max(sb.pieces[static_cast<std::size_t>(i)]);
    }
    const double lead_bound = amax[0] * bmax[0];

    struct PairIdx {
        int alpha, beta;
    };
    std::vector<PairIdx> pairs;
    for (int alpha = 0; alpha < d; ++alpha)
        for (int beta = 0; beta + alpha < d; ++beta) {
            if (drop_threshold > 0.0 &&
                amax[static_cast<std::size_t>(alpha)] * bmax[static_cast<std::size_t>(beta)] <
                    drop_threshold * lead_bound)
                continue;
            pairs.push_back({alpha, beta});
        }

    std::vector<DenseMatrix<double>> products(pairs.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(pairs.size()); ++p) {
        const auto idx = static_cast<std::size_t>(p);
        products[idx] = backend(sa.pieces[static_cast<std::size_t>(pairs[idx].alpha)],
                                sb.pieces[static_cast<std::size_t>(pairs[idx].beta)]);
    }
    auto t2 = clock::now();
    prof.product_seconds = std::chrono::duration<double>(t2 - t1).count();

    DenseMatrix<MultiFloat<K>> c(a.rows(), b.cols());
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t ee = 0; ee < static_cast<std::ptrdiff_t>(c.size()); ++ee) {
        const auto e = static_cast<std::size_t>(ee);
        MultiFloat<K> acc;
        for (std::size_t p = 0; p < products.size(); ++p) acc += products[p].data()[e];
        c.data()[e] = acc;
    }
    auto t3 = clock::now();
    prof.accumulate_seconds = std::chrono::duration<double>(t3 - t2).count();

    return {std::move(c), prof};
}

} // namespace mpmat
