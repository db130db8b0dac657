// SPDX-License-Identifier: Apache-2.0
//
// Runtime kernel selection. This TU is built without SIMD flags; the
// variant TUs are only entered after the capability checks below.

#include "sortmc/simd_kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace sortmc::simd {

#if defined(__x86_64__) || defined(_M_X64)
const KernelTable* avx2_kernels_impl();
#endif
#if defined(__aarch64__) || defined(_M_ARM64)
const KernelTable* neon_kernels_impl();
#endif

const KernelTable* avx2_kernels() {
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2"))
        return avx2_kernels_impl();
#endif
    return nullptr;
}

const KernelTable* neon_kernels() {
#if defined(__aarch64__) || defined(_M_ARM64)
    return neon_kernels_impl(); // baseline on aarch64
#else
    return nullptr;
#endif
}

namespace {

std::atomic<const KernelTable*> g_forced{nullptr};

const KernelTable* detect() {
    if (const char* req = std::getenv("SORTMC_SIMD")) {
        if (std::strcmp(req, "scalar") == 0) return &scalar_kernels();
        if (std::strcmp(req, "avx2") == 0 && avx2_kernels()) return avx2_kernels();
        if (std::strcmp(req, "neon") == 0 && neon_kernels()) return neon_kernels();
    }
    if (const KernelTable* t = avx2_kernels()) return t;
    if (const KernelTable* t = neon_kernels()) return t;
    return &scalar_kernels();
}

} // namespace

const KernelTable& active_kernels() {
    if (const KernelTable* f = g_forced.load(std::memory_order_acquire))
        return *f;
    static const KernelTable* resolved = detect();
    return *resolved;
}

void force_kernels(const KernelTable* table) {
    g_forced.store(table, std::memory_order_release);
}

} // namespace sortmc::simd
