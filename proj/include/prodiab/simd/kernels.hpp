#pragma once

// Dense complex kernels used by the Lindblad right-hand sides.
// All matrices are column-major with leading dimension equal to the row count.

#include <complex>
#include <cstddef>

namespace prodiab::simd {

using cd = std::complex<double>;

enum class Backend { scalar, avx2 };

// y = A x, A is m x n
using GemvFn = void (*)(std::size_t m, std::size_t n, const cd* A, const cd* x, cd* y);
// C = A B, A is m x k, B is k x n
using GemmFn = void (*)(std::size_t m, std::size_t n, std::size_t k, const cd* A, const cd* B, cd* C);
// y += a x
using AxpyFn = void (*)(std::size_t n, cd a, const cd* x, cd* y);

struct KernelTable {
    GemvFn gemv;
    GemmFn gemm;
    AxpyFn axpy;
};

namespace scalar {
void gemv(std::size_t m, std::size_t n, const cd* A, const cd* x, cd* y);
void gemm(std::size_t m, std::size_t n, std::size_t k, const cd* A, const cd* B, cd* C);
void axpy(std::size_t n, cd a, const cd* x, cd* y);
}  // namespace scalar

namespace avx2 {
void gemv(std::size_t m, std::size_t n, const cd* A, const cd* x, cd* y);
void gemm(std::size_t m, std::size_t n, std::size_t k, const cd* A, const cd* B, cd* C);
void axpy(std::size_t n, cd a, const cd* x, cd* y);
}  // namespace avx2

bool avx2_compiled();
bool avx2_supported();  // compiled in and the CPU reports avx2+fma

Backend active_backend();
// Throws DomainError if avx2 is requested but not supported.
void set_backend(Backend b);
const char* backend_name(Backend b);
const KernelTable& kernels();

// Dispatching entry points.
inline void gemv(std::size_t m, std::size_t n, const cd* A, const cd* x, cd* y) { kernels().gemv(m, n, A, x, y); }
inline void gemm(std::size_t m, std::size_t n, std::size_t k, const cd* A, const cd* B, cd* C) {
    kernels().gemm(m, n, k, A, B, C);
}
inline void axpy(std::size_t n, cd a, const cd* x, cd* y) { kernels().axpy(n, a, x, y); }

}  // namespace prodiab::simd
