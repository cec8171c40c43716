#pragma once
#include "dense_matrix.hpp"
#include "multifloat.hpp"

#include <gmpxx.h>

#include <cstdint>
#include <vector>

// Exact-arithmetic references for tests and error measurement. Everything
// here is exact by construction; nothing belongs on a benchmark hot path.

namespace mpmat::oracle {

// Exact dyadic scalar: mant * 2^exp with an arbitrary-precision mantissa.
// Represents any finite binary64 or MultiFloat value exactly and is closed
// under +, -, *.
class BigFloat {
    mpz_class mant_;
    long exp_ = 0;

public:
    BigFloat() = default;

    explicit BigFloat(double x);

    template <int K>
    explicit BigFloat(const MultiFloat<K>& x) {
        for (int i = 0; i < K; ++i) *this += BigFloat(x.component(i));
    }

    bool is_zero() const { return mant_ == 0; }
    int sign() const { return sgn(mant_); }
    const mpz_class& mantissa() const { return mant_; }
    long exponent() const { return exp_; }

    BigFloat& operator+=(const BigFloat& o);
    friend BigFloat operator+(BigFloat a, const BigFloat& b) { return a += b; }
    friend BigFloat operator-(const BigFloat& a);
    friend BigFloat operator-(BigFloat a, const BigFloat& b) { return a += -b; }
    friend BigFloat operator*(const BigFloat& a, const BigFloat& b);

    friend bool operator==(const BigFloat& a, const BigFloat& b) {
        return (a - b).is_zero();
    }

    BigFloat abs() const;

    // Round-to-double conversion for measurements (not exact; relative
    // error below 2^-52, saturating to +-inf out of range).
    double to_double() const;

    mpq_class to_mpq() const;
};

using ExactMatrix = std::vector<BigFloat>; // row-major, shape carried by caller

// Exact matrix product of long-precision inputs.
template <int K>
ExactMatrix exact_gemm(const DenseMatrix<MultiFloat<K>>& a, const DenseMatrix<MultiFloat<K>>& b) {
    if (a.cols() != b.rows()) throw shape_error("exact_gemm: inner dimensions differ");
    const std::size_t m = a.rows(), l = a.cols(), n = b.cols();
    std::vector<BigFloat> ea(m * l), eb(l * n);
    for (std::size_t i = 0; i < m * l; ++i) ea[i] = BigFloat(a.data()[i]);
    for (std::size_t i = 0; i < l * n; ++i) eb[i] = BigFloat(b.data()[i]);
    ExactMatrix c(m * n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = 0; k < l; ++k) {
            const BigFloat& aik = ea[i * l + k];
            if (aik.is_zero()) continue;
            for (std::size_t j = 0; j < n; ++j) c[i * n + j] += aik * eb[k * n + j];
        }
    return c;
}

// Exact product of binary64 matrices (split pieces, L/U factors).
ExactMatrix exact_gemm_f64(const DenseMatrix<double>& a, const DenseMatrix<double>& b);

// max over elements of |c_ij - ref_ij| / |ref_ij|; elements whose reference
// is exactly zero contribute |c_ij| absolutely.
template <int K>
double max_rel_error(const DenseMatrix<MultiFloat<K>>& c, const ExactMatrix& ref) {
    if (c.size() != ref.size()) throw shape_error("max_rel_error: shape mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        BigFloat diff = BigFloat(c.data()[i]) - ref[i];
        double err = ref[i].is_zero() ? diff.abs().to_double()
                                      : diff.abs().to_double() / ref[i].abs().to_double();
        if (err > worst) worst = err;
    }
    return worst;
}

double max_rel_error_vec(const std::vector<BigFloat>& x, const std::vector<mpq_class>& ref);

// Exact rational solve by fraction-free (Bareiss) elimination on the
// dyadic-scaled integer system. Throws singular_error when A is singular
// over the rationals.
template <int K>
std::vector<mpq_class> exact_solve(const DenseMatrix<MultiFloat<K>>& a,
                                   const std::vector<MultiFloat<K>>& b);

std::vector<mpq_class> exact_solve_scaled(std::vector<mpz_class> aug, std::size_t n);

namespace detail {
// Converts dyadic entries to integers on a common power-of-two grid and
// returns the augmented [A|b] integer matrix.
template <int K>
std::vector<mpz_class> scale_system(const DenseMatrix<MultiFloat<K>>& a,
                                    const std::vector<MultiFloat<K>>& b) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw shape_error("exact_solve: matrix must be square");
    if (b.size() != n) throw shape_error("exact_solve: rhs length mismatch");
    std::vector<BigFloat> entries(n * n + n);
    for (std::size_t i = 0; i < n * n; ++i) entries[i] = BigFloat(a.data()[i]);
    for (std::size_t i = 0; i < n; ++i) entries[n * n + i] = BigFloat(b[i]);
    long emin = 0;
    bool seen = false;
    for (const auto& e : entries)
        if (!e.is_zero() && (!seen || e.exponent() < emin)) {
            emin = e.exponent();
            seen = true;
        }
    std::vector<mpz_class> aug(n * (n + 1));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const BigFloat& e = entries[i * n + j];
            if (!e.is_zero())
                mpz_mul_2exp(aug[i * (n + 1) + j].get_mpz_t(), e.mantissa().get_mpz_t(),
                             static_cast<mp_bitcnt_t>(e.exponent() - emin));
        }
        const BigFloat& e = entries[n * n + i];
        if (!e.is_zero())
            mpz_mul_2exp(aug[i * (n + 1) + n].get_mpz_t(), e.mantissa().get_mpz_t(),
                         static_cast<mp_bitcnt_t>(e.exponent() - emin));
    }
    return aug;
}
} // namespace detail

template <int K>
std::vector<mpq_class> exact_solve(const DenseMatrix<MultiFloat<K>>& a,
                                   const std::vector<MultiFloat<K>>& b) {
    return exact_solve_scaled(detail::scale_system(a, b), a.rows());
}

} // namespace mpmat::oracle
