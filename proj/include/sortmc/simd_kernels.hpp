// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>

namespace sortmc::simd {

// All kernels operate on split key/payload arrays (SoA). The compare is
// lexicographic on (key, payload), both unsigned 64-bit. Every variant of
// a kernel must produce bit-identical results; equivalence is enforced by
// tests/test_simd_kernels.cpp.
struct KernelTable {
    const char* name;

    // Compare-exchange keys[a+t] vs keys[b+t] for t in [0, len).
    // Ascending keeps the smaller record at index a+t. Returns the number
    // of lanes that actually exchanged.
    std::uint64_t (*cmpswap_asc)(std::uint64_t* keys, std::uint64_t* pays,
                                 std::size_t a, std::size_t b, std::size_t len);
    std::uint64_t (*cmpswap_desc)(std::uint64_t* keys, std::uint64_t* pays,
                                  std::size_t a, std::size_t b, std::size_t len);

    // out[i] = mix64(base + (start + i) * kGamma) for i in [0, len).
    void (*counter_fill)(std::uint64_t* out, std::size_t len,
                         std::uint64_t base, std::uint64_t start);
};

const KernelTable& scalar_kernels();
const KernelTable* avx2_kernels(); // nullptr when unavailable on this host
const KernelTable* neon_kernels();

/// Best table for this host. Honors SORTMC_SIMD=scalar|avx2|neon (first call).
const KernelTable& active_kernels();

/// Test hook: force a table (nullptr restores auto-detection).
void force_kernels(const KernelTable* table);

} // namespace sortmc::simd
