#include <atomic>
#include <cstdlib>
#include <string>

#include "prodiab/error.hpp"
#include "prodiab/simd/kernels.hpp"

namespace prodiab::simd {

#ifndef PRODIAB_WITH_AVX2
namespace avx2 {
void gemv(std::size_t m, std::size_t n, const cd* A, const cd* x, cd* y) { scalar::gemv(m, n, A, x, y); }
void gemm(std::size_t m, std::size_t n, std::size_t k, const cd* A, const cd* B, cd* C) {
    scalar::gemm(m, n, k, A, B, C);
}
void axpy(std::size_t n, cd a, const cd* x, cd* y) { scalar::axpy(n, a, x, y); }
}  // namespace avx2
#endif

namespace {

const KernelTable kScalar{scalar::gemv, scalar::gemm, scalar::axpy};
const KernelTable kAvx2{avx2::gemv, avx2::gemm, avx2::axpy};

Backend initial_backend() {
    if (const char* env = std::getenv("PRODIAB_KERNELS")) {
        const std::string v(env);
        if (v == "scalar") return Backend::scalar;
        if (v == "avx2" && avx2_supported()) return Backend::avx2;
    }
    return avx2_supported() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& backend_slot() {
    static std::atomic<Backend> b{initial_backend()};
    return b;
}

}  // namespace

bool avx2_compiled() {
#ifdef PRODIAB_WITH_AVX2
    return true;
#else
    return false;
#endif
}

bool avx2_supported() {
#if defined(PRODIAB_WITH_AVX2) && (defined(__GNUC__) || defined(__clang__))
    static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return ok;
#else
    return false;
#endif
}

Backend active_backend() { return backend_slot().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
    if (b == Backend::avx2 && !avx2_supported()) throw DomainError("avx2 kernels not available on this machine");
    backend_slot().store(b, std::memory_order_relaxed);
}

const char* backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

const KernelTable& kernels() { return active_backend() == Backend::avx2 ? kAvx2 : kScalar; }

}  // namespace prodiab::simd
