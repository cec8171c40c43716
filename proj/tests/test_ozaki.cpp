#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mpmat/gemm.hpp"
#include "mpmat/gen.hpp"
#include "mpmat/oracle.hpp"
#include "mpmat/ozaki.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numeric>

using namespace mpmat;
using oracle::BigFloat;

namespace {

// Backend that accumulates each dot product in a seeded random order.
// A conforming implementation may sum in any order; on split pieces the
// result must still be exact.
GemmBackend shuffling_backend(std::uint64_t seed) {
    return [seed](const DenseMatrix<double>& a, const DenseMatrix<double>& b) {
        if (a.cols() != b.rows()) throw shape_error("shuffling_backend: shape");
        const std::size_t m = a.rows(), l = a.cols(), n = b.cols();
        DenseMatrix<double> c(m, n);
        Xoshiro256ss rng(seed ^ (m * 0x9e3779b9ULL + n * 1315423911ULL + l));
        std::vector<std::size_t> order(l);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                std::iota(order.begin(), order.end(), std::size_t{0});
                for (std::size_t k = l; k > 1; --k)
                    std::swap(order[k - 1], order[rng.next_u64() % k]);
                double acc = 0.0;
                for (std::size_t k : order) acc += a(i, k) * b(k, j);
                c(i, j) = acc;
            }
        return c;
    };
}

GemmBackend counting_backend(std::shared_ptr<std::atomic<int>> counter) {
    return [counter](const DenseMatrix<double>& a, const DenseMatrix<double>& b) {
        ++*counter;
        return reference_backend_gemm(a, b);
    };
}

bool is_integer_multiple_of(double x, int grid_exp) {
    if (x == 0.0) return true;
    double q = std::scalbn(x, -grid_exp);
    return std::fabs(q) < 0x1p62 && q == std::trunc(q);
}

// Replays the scaling loop from the split output: the working matrix
// before piece alpha is the original minus the earlier pieces (those
// subtractions are exact), which gives an independent check of the
// per-step grid exponents.
template <int K>
void check_split_grids(const DenseMatrix<MultiFloat<K>>& m, const SplitSet<K>& s) {
    const bool rows = s.side == SplitSide::rows;
    const std::size_t outer = rows ? m.rows() : m.cols();
    const std::size_t inner = s.inner_dim;
    const int sigma = split_shift_bits(inner);

    DenseMatrix<MultiFloat<K>> work = m;
    for (std::size_t alpha = 0; alpha < s.pieces.size(); ++alpha) {
        const auto& piece = s.pieces[alpha];
        auto image = leading_image(work);
        auto mu = rows ? mat_max_abs_row(image) : mat_max_abs_col(image);
        for (std::size_t o = 0; o < outer; ++o) {
            if (mu[o] == 0.0) {
                for (std::size_t p = 0; p < inner; ++p)
                    CHECK(piece(rows ? o : p, rows ? p : o) == 0.0);
                continue;
            }
            const int e = exponent_ceil_log2(mu[o]);
            for (std::size_t p = 0; p < inner; ++p) {
                const double v = piece(rows ? o : p, rows ? p : o);
                // integer multiple of 2^(e + sigma - 53 - 1); the finer
                // half-grid applies below the shift constant
                CHECK(is_integer_multiple_of(v, e + sigma - 53 - 1));
                CHECK(std::fabs(v) <= std::scalbn(1.0, e));
            }
        }
        for (std::size_t i = 0; i < work.size(); ++i) work.data()[i] -= piece.data()[i];
    }
    // replayed working copy must equal the reported residual bit for bit
    CHECK(work == s.residual);
}

template <int K>
void check_exact_products(const SplitSet<K>& sa, const SplitSet<K>& sb,
                          const GemmBackend& backend) {
    const int d = sa.split_count;
    for (int alpha = 0; alpha < d; ++alpha)
        for (int beta = 0; beta + alpha < d; ++beta) {
            const auto& pa = sa.pieces[static_cast<std::size_t>(alpha)];
            const auto& pb = sb.pieces[static_cast<std::size_t>(beta)];
            auto c = backend(pa, pb);
            auto ref = oracle::exact_gemm_f64(pa, pb);
            for (std::size_t i = 0; i < c.size(); ++i)
                CHECK(BigFloat(c.data()[i]) == ref[i]);
        }
}

} // namespace

TEST_CASE("exponent_ceil_log2") {
    CHECK(exponent_ceil_log2(1.0) == 0);
    CHECK(exponent_ceil_log2(8.0) == 3);
    CHECK(exponent_ceil_log2(9.0) == 4);
    CHECK(exponent_ceil_log2(0.5) == -1);
    CHECK(exponent_ceil_log2(0.75) == 0);

    Xoshiro256ss rng(55);
    for (int i = 0; i < 20000; ++i) {
        double x = std::scalbn(rng.next_uniform() + 1e-12,
                               static_cast<int>(rng.next_u64() % 600) - 300);
        int e = exponent_ceil_log2(x);
        // linear-scan oracle: smallest e with 2^e >= x
        int probe = -1100;
        while (std::scalbn(1.0, probe) < x) ++probe;
        CHECK(e == probe);
    }
}

TEST_CASE("shift exponent formula") {
    CHECK(split_shift_bits(1024) == 32); // ceil((53 + 10) / 2)
    CHECK(split_shift_bits(1) == 27);
    CHECK(split_shift_bits(2) == 27);
    CHECK(split_shift_bits(8) == 28);
    CHECK(split_shift_bits(9) == 29);
    CHECK(split_shift_bits(256) == 31);
    CHECK(split_shift_bits(5) == 28); // ceil((53 + log2 5)/2) = ceil(27.66)
}

TEST_CASE("split: D=1 degenerates to the leading image") {
    auto m = gen_matrix_eq1<2>(6, 4, 70);
    auto s = split_matrix(m, 1, SplitSide::rows);
    REQUIRE(s.pieces.size() == 1);
    CHECK(s.pieces[0] == leading_image(m));
    // residual carries the exact tail
    for (std::size_t i = 0; i < m.size(); ++i) {
        BigFloat rec = BigFloat(s.pieces[0].data()[i]) + BigFloat(s.residual.data()[i]);
        CHECK(rec == BigFloat(m.data()[i]));
    }
}

TEST_CASE("split: zero matrix gives all-zero pieces") {
    DenseMatrix<DoubleDouble> z(4, 5);
    for (int d : {1, 3}) {
        auto s = split_matrix(z, d, SplitSide::rows);
        for (const auto& p : s.pieces)
            for (std::size_t i = 0; i < p.size(); ++i) CHECK(p.data()[i] == 0.0);
    }
}

TEST_CASE("split: zero rows and columns are skipped without log2(0)") {
    auto m = gen_matrix_eq1<2>(6, 6, 71);
    for (std::size_t j = 0; j < 6; ++j) m(2, j) = DoubleDouble(0.0);
    for (std::size_t i = 0; i < 6; ++i) m(i, 4) = DoubleDouble(0.0);
    auto sa = split_matrix(m, 3, SplitSide::rows);
    auto sb = split_matrix(m, 3, SplitSide::cols);
    for (const auto& p : sa.pieces)
        for (std::size_t j = 0; j < 6; ++j) CHECK(p(2, j) == 0.0);
    for (const auto& p : sb.pieces)
        for (std::size_t i = 0; i < 6; ++i) CHECK(p(i, 4) == 0.0);
    check_split_grids(m, sa);
    check_split_grids(m, sb);
}

TEST_CASE("split: parameter and input errors") {
    auto m = gen_matrix_eq1<2>(2, 2, 72);
    CHECK_THROWS_AS((void)split_matrix(m, 0, SplitSide::rows), param_error);
    m(0, 0) = DoubleDouble(1.0) / DoubleDouble(0.0);
    CHECK_THROWS_AS((void)split_matrix(m, 2, SplitSide::rows), param_error);
}

TEST_CASE("split: reconstruction and grid invariants (dd 16x16, D=4)") {
    auto m = gen_matrix_eq1<2>(16, 16, 73);
    auto s = split_matrix(m, 4, SplitSide::rows);
    REQUIRE(s.pieces.size() == 4);
    check_split_grids(m, s);

    // sum of pieces plus residual reconstructs the input exactly
    for (std::size_t i = 0; i < m.size(); ++i) {
        BigFloat rec(s.residual.data()[i]);
        for (const auto& p : s.pieces) rec += BigFloat(p.data()[i]);
        CHECK(rec == BigFloat(m.data()[i]));
    }

    // piece magnitude decay, rowwise
    const double factor = std::scalbn(2.0, -((53 - 4) / 2)); // l = 16
    for (std::size_t alpha = 0; alpha + 1 < 4; ++alpha) {
        auto cur = mat_max_abs_row(s.pieces[alpha]);
        auto nxt = mat_max_abs_row(s.pieces[alpha + 1]);
        for (std::size_t i = 0; i < 16; ++i)
            if (cur[i] != 0.0) CHECK(nxt[i] <= factor * cur[i]);
    }
}

TEST_CASE("split grids on the B side (td)") {
    auto m = gen_matrix_eq1<3>(12, 9, 74);
    auto s = split_matrix(m, 5, SplitSide::cols);
    CHECK(s.inner_dim == 12);
    check_split_grids(m, s);
}

TEST_CASE("error-freeness: every triangular product is exact, any backend") {
    auto reference = reference_backend();
    auto adversarial = shuffling_backend(0xbadc0ffee);
    for (std::size_t n : {8, 24}) {
        auto a = gen_matrix_eq1<2>(n, n, 80 + n);
        auto b = gen_matrix_eq1<2>(n, n, 81 + n);
        for (int d : {2, 4}) {
            auto sa = split_matrix(a, d, SplitSide::rows);
            auto sb = split_matrix(b, d, SplitSide::cols);
            check_exact_products(sa, sb, reference);
            check_exact_products(sa, sb, adversarial);
        }
    }
}

TEST_CASE("backend independence: shuffled summation changes nothing") {
    auto a = gen_matrix_eq1<3>(20, 20, 90);
    auto b = gen_matrix_eq1<3>(20, 20, 91);
    auto [c1, p1] = ozaki_gemm(a, b, 5, reference_backend());
    auto [c2, p2] = ozaki_gemm(a, b, 5, shuffling_backend(12345));
    CHECK(c1 == c2);
}

TEST_CASE("triangular product count is D(D+1)/2") {
    auto counter = std::make_shared<std::atomic<int>>(0);
    auto backend = counting_backend(counter);

    auto a3 = gen_matrix_eq1<2>(3, 3, 92);
    auto b3 = gen_matrix_eq1<2>(3, 3, 93);
    (void)ozaki_gemm(a3, b3, 3, backend);
    CHECK(*counter == 6); // C11 C12 C13 C21 C22 C31

    for (int d : {1, 2, 5, 8}) {
        *counter = 0;
        auto a = gen_matrix_eq1<2>(5, 4, 94);
        auto b = gen_matrix_eq1<2>(4, 7, 95);
        (void)ozaki_gemm(a, b, d, backend);
        CHECK(*counter == d * (d + 1) / 2);
    }
}

TEST_CASE("ozaki_gemm: small exact cases") {
    DenseMatrix<DoubleDouble> a(1, 1), b(1, 1);
    a(0, 0) = DoubleDouble(3.0);
    b(0, 0) = DoubleDouble(4.0);
    auto [c, prof] = ozaki_gemm(a, b, 2, reference_backend());
    CHECK(c(0, 0) == DoubleDouble(12.0));

    // the identity splits exactly, so A*I error is pure split truncation:
    // ~2 * 24 captured bits at D=2, the full value once D covers 106 bits
    auto m = gen_matrix_eq1<2>(10, 10, 96);
    auto eye = DenseMatrix<DoubleDouble>::identity(10);
    auto ref = oracle::exact_gemm(m, eye);
    auto [c2, prof2] = ozaki_gemm(m, eye, 2, reference_backend());
    CHECK(oracle::max_rel_error(c2, ref) <= 0x1p-35); // 48-bit capture, element spread
    auto [c6, prof6] = ozaki_gemm(m, eye, 6, reference_backend());
    CHECK(oracle::max_rel_error(c6, ref) <= 0x1p-100);

    CHECK_THROWS_AS((void)ozaki_gemm(a, DenseMatrix<DoubleDouble>(2, 2), 2, reference_backend()),
                    shape_error);
    CHECK_THROWS_AS((void)ozaki_gemm(a, b, 0, reference_backend()), param_error);
}

TEST_CASE("drop threshold prunes low-order pairs, default keeps all") {
    auto counter = std::make_shared<std::atomic<int>>(0);
    auto backend = counting_backend(counter);
    auto a = gen_matrix_eq1<2>(16, 16, 201);
    auto b = gen_matrix_eq1<2>(16, 16, 202);
    auto ref = oracle::exact_gemm(a, b);

    auto [full, pf] = ozaki_gemm(a, b, 5, backend);
    CHECK(*counter == 15);

    *counter = 0;
    auto [pruned, pp] = ozaki_gemm(a, b, 5, backend, 0x1p-60);
    CHECK(*counter < 15); // deep pairs fall below the bound and are skipped
    CHECK(*counter >= 5); // the leading pairs always survive

    // pruning only perturbs below the kept-pair magnitude level
    CHECK(oracle::max_rel_error(full, ref) <= oracle::max_rel_error(pruned, ref));
    CHECK(oracle::max_rel_error(pruned, ref) <= 1e-12);

    CHECK_THROWS_AS((void)ozaki_gemm(a, b, 3, backend, -1.0), param_error);
}

TEST_CASE("oversized D only appends zero pieces") {
    auto a = gen_matrix_eq1<2>(8, 8, 97);
    auto b = gen_matrix_eq1<2>(8, 8, 98);
    auto [c10, p10] = ozaki_gemm(a, b, 10, reference_backend());
    auto [c12, p12] = ozaki_gemm(a, b, 12, reference_backend());
    CHECK(c10 == c12); // extra pieces are exactly zero
}

TEST_CASE("accuracy improves with D and reaches the long-precision floor") {
    // D=1 (raw 53-bit image + backend rounding) sits below D=2 (two 24-bit
    // pieces, exact products); the curve is monotone from D=2 onward
    const std::size_t n = 48;
    auto a = gen_matrix_eq1<2>(n, n, 99);
    auto b = gen_matrix_eq1<2>(n, n, 100);
    auto ref = oracle::exact_gemm(a, b);
    double prev = 1e300;
    for (int d = 2; d <= 8; ++d) {
        auto [c, prof] = ozaki_gemm(a, b, d, reference_backend());
        double err = oracle::max_rel_error(c, ref);
        CHECK(err <= prev * 1.15);
        prev = std::min(prev, err);
        if (d == 8) CHECK(err <= 1e-30);
    }
}

TEST_CASE("profile accounts for the three phases") {
    auto a = gen_matrix_eq1<2>(32, 32, 101);
    auto b = gen_matrix_eq1<2>(32, 32, 102);
    auto [c, prof] = ozaki_gemm(a, b, 4, reference_backend());
    CHECK(prof.split_seconds >= 0.0);
    CHECK(prof.product_seconds >= 0.0);
    CHECK(prof.accumulate_seconds >= 0.0);
    CHECK(prof.split_count == 4);
    double fr = prof.split_fraction() + prof.product_fraction() + prof.accumulate_fraction();
    CHECK(fr == doctest::Approx(1.0));
}
