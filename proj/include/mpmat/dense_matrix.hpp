#pragma once
#include "errors.hpp"
#include "multifloat.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace mpmat {

// Row-major dense matrix over binary64 or MultiFloat elements.
template <typename E>
class DenseMatrix {
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<E> data_;

public:
    DenseMatrix() = default;

    DenseMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols) {
        if (rows == 0 || cols == 0) throw shape_error("matrix dimensions must be positive");
    }

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = E(1.0);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    E& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const E& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    E* data() { return data_.data(); }
    const E* data() const { return data_.data(); }
    std::size_t size() const { return data_.size(); }

    friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }
};

namespace detail {
inline void require_same_shape(std::size_t ar, std::size_t ac, std::size_t br, std::size_t bc,
                               const char* op) {
    if (ar != br || ac != bc)
        throw shape_error(std::string(op) + ": shape mismatch");
}
} // namespace detail

template <typename E>
DenseMatrix<E> mat_add(const DenseMatrix<E>& a, const DenseMatrix<E>& b) {
    detail::require_same_shape(a.rows(), a.cols(), b.rows(), b.cols(), "mat_add");
    DenseMatrix<E> c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) c.data()[i] = a.data()[i] + b.data()[i];
    return c;
}

template <typename E>
DenseMatrix<E> mat_sub(const DenseMatrix<E>& a, const DenseMatrix<E>& b) {
    detail::require_same_shape(a.rows(), a.cols(), b.rows(), b.cols(), "mat_sub");
    DenseMatrix<E> c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) c.data()[i] = a.data()[i] - b.data()[i];
    return c;
}

// Per-row maxima of absolute values (used for the A-side scaling vector).
inline std::vector<double> mat_max_abs_row(const DenseMatrix<double>& a) {
    std::vector<double> mu(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double m = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) m = std::fmax(m, std::fabs(a(i, j)));
        mu[i] = m;
    }
    return mu;
}

// Per-column maxima of absolute values (B-side scaling vector).
inline std::vector<double> mat_max_abs_col(const DenseMatrix<double>& a) {
    std::vector<double> mu(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) mu[j] = std::fmax(mu[j], std::fabs(a(i, j)));
    return mu;
}

// Leading binary64 components of a long-precision matrix.
template <int K>
DenseMatrix<double> leading_image(const DenseMatrix<MultiFloat<K>>& a) {
    DenseMatrix<double> s(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) s.data()[i] = a.data()[i].hi();
    return s;
}

// Exact embedding of a binary64 matrix.
template <int K>
DenseMatrix<MultiFloat<K>> embed(const DenseMatrix<double>& a) {
    DenseMatrix<MultiFloat<K>> m(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.size(); ++i) m.data()[i] = MultiFloat<K>(a.data()[i]);
    return m;
}

template <int K>
double max_abs_leading(const DenseMatrix<MultiFloat<K>>& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::fmax(m, std::fabs(a.data()[i].hi()));
    return m;
}

} // namespace mpmat
