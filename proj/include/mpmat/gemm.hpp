#pragma once
#include "dense_matrix.hpp"

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mpmat {

// Triple-loop product with a fixed k = 0..l-1 accumulation order per
// element, so results are bit-reproducible at any thread count (rows are
// independent).
template <typename E>
DenseMatrix<E> gemm_simple(const DenseMatrix<E>& a, const DenseMatrix<E>& b) {
    if (a.cols() != b.rows()) throw shape_error("gemm_simple: inner dimensions differ");
    const std::size_t m = a.rows(), l = a.cols(), n = b.cols();
    DenseMatrix<E> c(m, n);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(m); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        for (std::size_t k = 0; k < l; ++k) {
            const E& aik = a(i, k);
            for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

namespace detail {

template <typename E>
DenseMatrix<E> pad_even(const DenseMatrix<E>& a) {
    std::size_t r = a.rows() + (a.rows() & 1);
    std::size_t c = a.cols() + (a.cols() & 1);
    if (r == a.rows() && c == a.cols()) return a;
    DenseMatrix<E> p(r, c);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) p(i, j) = a(i, j);
    return p;
}

template <typename E>
DenseMatrix<E> block(const DenseMatrix<E>& a, std::size_t i0, std::size_t j0, std::size_t r,
                     std::size_t c) {
    DenseMatrix<E> b(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) b(i, j) = a(i0 + i, j0 + j);
    return b;
}

template <typename E>
void place(DenseMatrix<E>& dst, const DenseMatrix<E>& src, std::size_t i0, std::size_t j0,
           std::size_t r, std::size_t c) {
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) dst(i0 + i, j0 + j) = src(i, j);
}

} // namespace detail

// Strassen recursion: 7 products and 18 additions per level, falling back
// to gemm_simple at the cutoff (long-precision additions dominate below
// the default). Odd dimensions get one zero row/column of padding per
// level, stripped on return.
template <typename E>
DenseMatrix<E> strassen(const DenseMatrix<E>& a, const DenseMatrix<E>& b,
                        std::size_t cutoff = 32) {
    if (a.cols() != b.rows()) throw shape_error("strassen: inner dimensions differ");
    if (cutoff < 1) throw param_error("strassen: cutoff must be >= 1");
    const std::size_t m = a.rows(), l = a.cols(), n = b.cols();
    if (m <= cutoff && l <= cutoff && n <= cutoff) return gemm_simple(a, b);
    if (m <= 1 || l <= 1 || n <= 1) return gemm_simple(a, b);

    DenseMatrix<E> ap = detail::pad_even(a);
    DenseMatrix<E> bp = detail::pad_even(b);
    const std::size_t mh = ap.rows() / 2, lh = ap.cols() / 2, nh = bp.cols() / 2;

    auto a11 = detail::block(ap, 0, 0, mh, lh), a12 = detail::block(ap, 0, lh, mh, lh);
    auto a21 = detail::block(ap, mh, 0, mh, lh), a22 = detail::block(ap, mh, lh, mh, lh);
    auto b11 = detail::block(bp, 0, 0, lh, nh), b12 = detail::block(bp, 0, nh, lh, nh);
    auto b21 = detail::block(bp, lh, 0, lh, nh), b22 = detail::block(bp, lh, nh, lh, nh);

    auto m1 = strassen(mat_add(a11, a22), mat_add(b11, b22), cutoff);
    auto m2 = strassen(mat_add(a21, a22), b11, cutoff);
    auto m3 = strassen(a11, mat_sub(b12, b22), cutoff);
    auto m4 = strassen(a22, mat_sub(b21, b11), cutoff);
    auto m5 = strassen(mat_add(a11, a12), b22, cutoff);
    auto m6 = strassen(mat_sub(a21, a11), mat_add(b11, b12), cutoff);
    auto m7 = strassen(mat_sub(a12, a22), mat_add(b21, b22), cutoff);

    auto c11 = mat_add(mat_sub(mat_add(m1, m4), m5), m7);
    auto c12 = mat_add(m3, m5);
    auto c21 = mat_add(m2, m4);
    auto c22 = mat_add(mat_add(mat_sub(m1, m2), m3), m6);

    DenseMatrix<E> c(m, n);
    detail::place(c, c11, 0, 0, std::min(mh, m), std::min(nh, n));
    if (nh < n) detail::place(c, c12, 0, nh, std::min(mh, m), n - nh);
    if (mh < m) detail::place(c, c21, mh, 0, m - mh, std::min(nh, n));
    if (mh < m && nh < n) detail::place(c, c22, mh, nh, m - mh, n - nh);
    return c;
}

} // namespace mpmat
