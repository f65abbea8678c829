#include <immintrin.h>

#include "prodiab/simd/kernels.hpp"

namespace prodiab::simd::avx2 {

namespace {

// One __m256d holds two complex numbers [re0, im0, re1, im1].
// For a column a and scalar s: a*s = addsub(a*s_re, swap(a)*s_im).
// The two halves are accumulated separately and combined once per row block.

constexpr std::size_t kBlock = 8;  // complex rows per block, 4 registers

inline __m256d load2(const cd* p) { return _mm256_loadu_pd(reinterpret_cast<const double*>(p)); }
inline void store2(cd* p, __m256d v) { _mm256_storeu_pd(reinterpret_cast<double*>(p), v); }
inline __m256d swap_ri(__m256d v) { return _mm256_permute_pd(v, 0b0101); }

}  // namespace

void gemv(std::size_t m, std::size_t n, const cd* A, const cd* x, cd* y) {
    std::size_t i0 = 0;
    for (; i0 + kBlock <= m; i0 += kBlock) {
        __m256d re0 = _mm256_setzero_pd(), re1 = re0, re2 = re0, re3 = re0;
        __m256d im0 = re0, im1 = re0, im2 = re0, im3 = re0;
        for (std::size_t j = 0; j < n; ++j) {
            const __m256d sr = _mm256_set1_pd(x[j].real());
            const __m256d si = _mm256_set1_pd(x[j].imag());
            const cd* col = A + j * m + i0;
            const __m256d a0 = load2(col), a1 = load2(col + 2), a2 = load2(col + 4), a3 = load2(col + 6);
            re0 = _mm256_fmadd_pd(a0, sr, re0);
            re1 = _mm256_fmadd_pd(a1, sr, re1);
            re2 = _mm256_fmadd_pd(a2, sr, re2);
            re3 = _mm256_fmadd_pd(a3, sr, re3);
            im0 = _mm256_fmadd_pd(swap_ri(a0), si, im0);
            im1 = _mm256_fmadd_pd(swap_ri(a1), si, im1);
            im2 = _mm256_fmadd_pd(swap_ri(a2), si, im2);
            im3 = _mm256_fmadd_pd(swap_ri(a3), si, im3);
        }
        store2(y + i0, _mm256_addsub_pd(re0, im0));
        store2(y + i0 + 2, _mm256_addsub_pd(re1, im1));
        store2(y + i0 + 4, _mm256_addsub_pd(re2, im2));
        store2(y + i0 + 6, _mm256_addsub_pd(re3, im3));
    }
    for (; i0 + 2 <= m; i0 += 2) {
        __m256d re = _mm256_setzero_pd(), im = re;
        for (std::size_t j = 0; j < n; ++j) {
            const __m256d a = load2(A + j * m + i0);
            re = _mm256_fmadd_pd(a, _mm256_set1_pd(x[j].real()), re);
            im = _mm256_fmadd_pd(swap_ri(a), _mm256_set1_pd(x[j].imag()), im);
        }
        store2(y + i0, _mm256_addsub_pd(re, im));
    }
    if (i0 < m) {
        double r = 0.0, q = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const cd a = A[j * m + i0];
            r += a.real() * x[j].real() - a.imag() * x[j].imag();
            q += a.real() * x[j].imag() + a.imag() * x[j].real();
        }
        y[i0] = cd(r, q);
    }
}

void gemm(std::size_t m, std::size_t n, std::size_t k, const cd* A, const cd* B, cd* C) {
    for (std::size_t c = 0; c < n; ++c) gemv(m, k, A, B + c * k, C + c * m);
}

void axpy(std::size_t n, cd a, const cd* x, cd* y) {
    const __m256d sr = _mm256_set1_pd(a.real());
    const __m256d si = _mm256_set1_pd(a.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d v = load2(x + i);
        const __m256d prod = _mm256_addsub_pd(_mm256_mul_pd(v, sr), _mm256_mul_pd(swap_ri(v), si));
        store2(y + i, _mm256_add_pd(load2(y + i), prod));
    }
    for (; i < n; ++i) {
        const double xr = x[i].real(), xi = x[i].imag();
        y[i] = cd(y[i].real() + a.real() * xr - a.imag() * xi, y[i].imag() + a.real() * xi + a.imag() * xr);
    }
}

}  // namespace prodiab::simd::avx2
