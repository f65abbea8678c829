#include "prodiab/simd/kernels.hpp"

namespace prodiab::simd::scalar {

// Plain complex arithmetic written out on re/im parts; std::complex operator*
// goes through the C99 NaN-recovery path which is several times slower.

void gemv(std::size_t m, std::size_t n, const cd* A, const cd* x, cd* y) {
    for (std::size_t i = 0; i < m; ++i) y[i] = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double xr = x[j].real(), xi = x[j].imag();
        if (xr == 0.0 && xi == 0.0) continue;
        const cd* col = A + j * m;
        for (std::size_t i = 0; i < m; ++i) {
            const double ar = col[i].real(), ai = col[i].imag();
            y[i] = cd(y[i].real() + ar * xr - ai * xi, y[i].imag() + ar * xi + ai * xr);
        }
    }
}

void gemm(std::size_t m, std::size_t n, std::size_t k, const cd* A, const cd* B, cd* C) {
    for (std::size_t c = 0; c < n; ++c) gemv(m, k, A, B + c * k, C + c * m);
}

void axpy(std::size_t n, cd a, const cd* x, cd* y) {
    const double ar = a.real(), ai = a.imag();
    for (std::size_t i = 0; i < n; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        y[i] = cd(y[i].real() + ar * xr - ai * xi, y[i].imag() + ar * xi + ai * xr);
    }
}

}  // namespace prodiab::simd::scalar
