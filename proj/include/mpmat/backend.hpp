#pragma once
#include "dense_matrix.hpp"

#include <functional>

namespace mpmat {

// Contract for the short-precision (binary64) matrix multiply provider.
// Any summation order and FMA use are permitted: when the inputs are split
// pieces, exactness of the products is guaranteed by the splitting, not by
// the backend.
using GemmBackend =
    std::function<DenseMatrix<double>(const DenseMatrix<double>&, const DenseMatrix<double>&)>;

// Cache-blocked binary64 GEMM with packing and a fixed blocking scheme,
// so results are deterministic run to run.
DenseMatrix<double> reference_backend_gemm(const DenseMatrix<double>& a,
                                           const DenseMatrix<double>& b);

GemmBackend reference_backend();

#ifdef MPMAT_WITH_CBLAS
// Adapter over an external optimized BLAS (dgemm).
DenseMatrix<double> cblas_backend_gemm(const DenseMatrix<double>& a,
                                       const DenseMatrix<double>& b);
GemmBackend cblas_backend();
#endif

} // namespace mpmat
