#pragma once
#include "dense_matrix.hpp"
#include "multifloat.hpp"
#include "rng.hpp"

#include <array>
#include <cstdint>
#include <vector>

// Reproducible benchmark inputs. Element draw order is row-major; the
// per-element draw protocol is fixed (see each generator) so a seed pins
// the matrix bit-for-bit.

namespace mpmat {

// Test matrix with elements (ru - 0.5) * exp(rn), ru uniform on [0,1) with
// a full K*53-bit significand, rn standard normal. Per element: K uniform
// draws building ru from the top component down, then one normal (two
// draws). The exponential is evaluated in binary64.
template <int K>
DenseMatrix<MultiFloat<K>> gen_matrix_eq1(std::size_t m, std::size_t n, std::uint64_t seed) {
    DenseMatrix<MultiFloat<K>> a(m, n);
    Xoshiro256ss rng(seed);
    std::array<double, K> comp{};
    for (std::size_t idx = 0; idx < m * n; ++idx) {
        for (int k = 0; k < K; ++k)
            comp[static_cast<std::size_t>(k)] = std::scalbn(rng.next_uniform(), -53 * k);
        // components are non-overlapping by construction, so this is exact
        MultiFloat<K> ru = MultiFloat<K>::renormalize(comp);
        double scale = std::exp(rng.next_normal());
        a.data()[idx] = (ru - 0.5) * scale;
    }
    return a;
}

template <int K>
struct LinearSystem {
    DenseMatrix<MultiFloat<K>> a;
    std::vector<MultiFloat<K>> b;
};

// Linear system with a_ij uniform on [0,1) in binary64 (embedded exactly)
// and b = [1, 1/2, ..., 1/n] with the divisions done in long precision.
// One uniform draw per element, row-major.
template <int K>
LinearSystem<K> gen_lu_system(std::size_t n, std::uint64_t seed) {
    LinearSystem<K> sys{DenseMatrix<MultiFloat<K>>(n, n), std::vector<MultiFloat<K>>(n)};
    Xoshiro256ss rng(seed);
    for (std::size_t idx = 0; idx < n * n; ++idx)
        sys.a.data()[idx] = MultiFloat<K>(rng.next_uniform());
    for (std::size_t i = 0; i < n; ++i)
        sys.b[i] = MultiFloat<K>(1.0) / MultiFloat<K>(static_cast<double>(i + 1));
    return sys;
}

} // namespace mpmat
