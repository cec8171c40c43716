// Blocked binary64 GEMM. This translation unit is compiled with FP
// contraction enabled; the GemmBackend contract allows any summation
// order and FMA use.

#include "mpmat/backend.hpp"

#include <vector>

#ifdef MPMAT_WITH_CBLAS
#include <cblas.h>
#endif

namespace mpmat {

namespace {

// Block sizes tuned for a ~32K L1 / 256K+ L2; MR x NR register tile.
constexpr std::size_t MC = 64;
constexpr std::size_t KC = 256;
constexpr std::size_t NC = 1024;
constexpr std::size_t MR = 4;
constexpr std::size_t NR = 8;

// C[MR x NR] += A_pack[kc x MR] * B_pack[kc x NR], full tiles only.
void microkernel(std::size_t kc, const double* __restrict__ ap, const double* __restrict__ bp,
                 double* __restrict__ c, std::size_t ldc) {
    double acc[MR][NR] = {};
    for (std::size_t k = 0; k < kc; ++k) {
        const double* a = ap + k * MR;
        const double* b = bp + k * NR;
        for (std::size_t i = 0; i < MR; ++i)
            for (std::size_t j = 0; j < NR; ++j) acc[i][j] += a[i] * b[j];
    }
    for (std::size_t i = 0; i < MR; ++i)
        for (std::size_t j = 0; j < NR; ++j) c[i * ldc + j] += acc[i][j];
}

// Ragged edge tile.
void microkernel_edge(std::size_t kc, std::size_t mr, std::size_t nr,
                      const double* __restrict__ ap, const double* __restrict__ bp,
                      double* __restrict__ c, std::size_t ldc) {
    double acc[MR][NR] = {};
    for (std::size_t k = 0; k < kc; ++k) {
        const double* a = ap + k * MR;
        const double* b = bp + k * NR;
        for (std::size_t i = 0; i < mr; ++i)
            for (std::size_t j = 0; j < nr; ++j) acc[i][j] += a[i] * b[j];
    }
    for (std::size_t i = 0; i < mr; ++i)
        for (std::size_t j = 0; j < nr; ++j) c[i * ldc + j] += acc[i][j];
}

} // namespace

DenseMatrix<double> reference_backend_gemm(const DenseMatrix<double>& a,
                                           const DenseMatrix<double>& b) {
    if (a.cols() != b.rows()) throw shape_error("reference_backend_gemm: inner dimensions differ");
    const std::size_t m = a.rows(), l = a.cols(), n = b.cols();
    DenseMatrix<double> c(m, n);

    std::vector<double> apack(MC * KC);
    std::vector<double> bpack(KC * NC);

    for (std::size_t jc = 0; jc < n; jc += NC) {
        const std::size_t nc = std::min(NC, n - jc);
        for (std::size_t pc = 0; pc < l; pc += KC) {
            const std::size_t kc = std::min(KC, l - pc);
            // pack B panel: NR-wide column strips, k-major inside a strip
            for (std::size_t js = 0; js < nc; js += NR) {
                const std::size_t nr = std::min(NR, nc - js);
                double* dst = bpack.data() + js * KC;
                for (std::size_t k = 0; k < kc; ++k)
                    for (std::size_t j = 0; j < NR; ++j)
                        dst[k * NR + j] = j < nr ? b(pc + k, jc + js + j) : 0.0;
            }
            for (std::size_t ic = 0; ic < m; ic += MC) {
                const std::size_t mc = std::min(MC, m - ic);
                // pack A panel: MR-tall row strips, k-major inside a strip
                for (std::size_t is = 0; is < mc; is += MR) {
                    const std::size_t mr = std::min(MR, mc - is);
                    double* dst = apack.data() + is * KC;
                    for (std::size_t k = 0; k < kc; ++k)
                        for (std::size_t i = 0; i < MR; ++i)
                            dst[k * MR + i] = i < mr ? a(ic + is + i, pc + k) : 0.0;
                }
                for (std::size_t js = 0; js < nc; js += NR) {
                    const std::size_t nr = std::min(NR, nc - js);
                    for (std::size_t is = 0; is < mc; is += MR) {
                        const std::size_t mr = std::min(MR, mc - is);
                        double* cdst = &c(ic + is, jc + js);
                        if (mr == MR && nr == NR)
                            microkernel(kc, apack.data() + is * KC, bpack.data() + js * KC, cdst,
                                        n);
                        else
                            microkernel_edge(kc, mr, nr, apack.data() + is * KC,
                                             bpack.data() + js * KC, cdst, n);
                    }
                }
            }
        }
    }
    return c;
}

GemmBackend reference_backend() {
    return [](const DenseMatrix<double>& a, const DenseMatrix<double>& b) {
        return reference_backend_gemm(a, b);
    };
}

#ifdef MPMAT_WITH_CBLAS
DenseMatrix<double> cblas_backend_gemm(const DenseMatrix<double>& a,
                                       const DenseMatrix<double>& b) {
    if (a.cols() != b.rows()) throw shape_error("cblas_backend_gemm: inner dimensions differ");
    DenseMatrix<double> c(a.rows(), b.cols());
    cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, static_cast<int>(a.rows()),
                static_cast<int>(b.cols()), static_cast<int>(a.cols()), 1.0, a.data(),
                static_cast<int>(a.cols()), b.data(), static_cast<int>(b.cols()), 0.0, c.data(),
                static_cast<int>(b.cols()));
    return c;
}

GemmBackend cblas_backend() {
    return [](const DenseMatrix<double>& a, const DenseMatrix<double>& b) {
        return cblas_backend_gemm(a, b);
    };
}
#endif

} // namespace mpmat
