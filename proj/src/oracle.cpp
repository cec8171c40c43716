#include "mpmat/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace mpmat::oracle {

BigFloat::BigFloat(double x) {
    if (x == 0.0) return;
    if (!std::isfinite(x)) throw param_error("BigFloat: non-finite input");
    int e = 0;
    double m = std::frexp(x, &e); // x = m * 2^e, |m| in [0.5, 1)
    static_assert(sizeof(long) >= 8, "LP64 assumed");
    mant_ = static_cast<long>(std::ldexp(m, 53)); // exact 53-bit integer
    exp_ = e - 53;
}

BigFloat& BigFloat::operator+=(const BigFloat& o) {
    if (o.mant_ == 0) return *this;
    if (mant_ == 0) {
        *this = o;
        return *this;
    }
    if (exp_ == o.exp_) {
        mant_ += o.mant_;
    } else if (exp_ > o.exp_) {
        mpz_class shifted;
        mpz_mul_2exp(shifted.get_mpz_t(), mant_.get_mpz_t(),
                     static_cast<mp_bitcnt_t>(exp_ - o.exp_));
        mant_ = shifted + o.mant_;
        exp_ = o.exp_;
    } else {
        mpz_class shifted;
        mpz_mul_2exp(shifted.get_mpz_t(), o.mant_.get_mpz_t(),
                     static_cast<mp_bitcnt_t>(o.exp_ - exp_));
        mant_ += shifted;
    }
    if (mant_ == 0) exp_ = 0;
    return *this;
}

BigFloat operator-(const BigFloat& a) {
    BigFloat r = a;
    r.mant_ = -r.mant_;
    return r;
}

BigFloat operator*(const BigFloat& a, const BigFloat& b) {
    BigFloat r;
    if (a.mant_ == 0 || b.mant_ == 0) return r;
    r.mant_ = a.mant_ * b.mant_;
    r.exp_ = a.exp_ + b.exp_;
    return r;
}

BigFloat BigFloat::abs() const {
    BigFloat r = *this;
    if (r.mant_ < 0) r.mant_ = -r.mant_;
    return r;
}

double BigFloat::to_double() const {
    if (mant_ == 0) return 0.0;
    std::size_t bits = mpz_sizeinbase(mant_.get_mpz_t(), 2);
    long shift = 0;
    mpz_class m = mant_;
    if (bits > 64) {
        shift = static_cast<long>(bits) - 64;
        mpz_class q;
        mpz_tdiv_q_2exp(q.get_mpz_t(), mant_.get_mpz_t(), static_cast<mp_bitcnt_t>(shift));
        m = q;
    }
    double d = mpz_get_d(m.get_mpz_t());
    double total_exp = static_cast<double>(exp_) + static_cast<double>(shift);
    if (total_exp > 2000.0) return d > 0 ? HUGE_VAL : -HUGE_VAL;
    if (total_exp < -2000.0) return d > 0 ? 0.0 : -0.0;
    return std::ldexp(d, static_cast<int>(total_exp));
}

mpq_class BigFloat::to_mpq() const {
    mpq_class q;
    if (mant_ == 0) return q;
    if (exp_ >= 0) {
        mpz_class num;
        mpz_mul_2exp(num.get_mpz_t(), mant_.get_mpz_t(), static_cast<mp_bitcnt_t>(exp_));
        q = mpq_class(num);
    } else {
        mpz_class den = 1;
        mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), static_cast<mp_bitcnt_t>(-exp_));
        q = mpq_class(mant_, den);
        q.canonicalize();
    }
    return q;
}

ExactMatrix exact_gemm_f64(const DenseMatrix<double>& a, const DenseMatrix<double>& b) {
    if (a.cols() != b.rows()) throw shape_error("exact_gemm_f64: inner dimensions differ");
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

double max_rel_error_vec(const std::vector<BigFloat>& x, const std::vector<mpq_class>& ref) {
    if (x.size() != ref.size()) throw shape_error("max_rel_error_vec: length mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mpq_class diff = x[i].to_mpq() - ref[i];
        mpq_class ad = ::abs(diff);
        double err;
        if (ref[i] == 0) {
            err = ad.get_d();
        } else {
            mpq_class ar = ::abs(ref[i]);
            mpq_class ratio = ad / ar;
            err = ratio.get_d();
        }
        if (err > worst) worst = err;
    }
    return worst;
}

// Bareiss fraction-free elimination on the augmented integer matrix,
// followed by exact rational back-substitution.
std::vector<mpq_class> exact_solve_scaled(std::vector<mpz_class> aug, std::size_t n) {
    const std::size_t w = n + 1;
    auto at = [&](std::size_t i, std::size_t j) -> mpz_class& { return aug[i * w + j]; };

    mpz_class prev_pivot = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (at(k, k) == 0) {
            std::size_t swap_row = k + 1;
            while (swap_row < n && at(swap_row, k) == 0) ++swap_row;
            if (swap_row == n) throw singular_error("exact_solve: singular matrix");
            for (std::size_t j = 0; j < w; ++j) std::swap(at(k, j), at(swap_row, j));
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < w; ++j) {
                mpz_class t = at(i, j) * at(k, k) - at(i, k) * at(k, j);
                mpz_divexact(at(i, j).get_mpz_t(), t.get_mpz_t(), prev_pivot.get_mpz_t());
            }
            at(i, k) = 0;
        }
        prev_pivot = at(k, k);
    }
    if (at(n - 1, n - 1) == 0) throw singular_error("exact_solve: singular matrix");

    std::vector<mpq_class> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        mpq_class acc(at(ii, n));
        for (std::size_t j = ii + 1; j < n; ++j) acc -= mpq_class(at(ii, j)) * x[j];
        x[ii] = acc / mpq_class(at(ii, ii));
        x[ii].canonicalize();
    }
    return x;
}

} // namespace mpmat::oracle
