// SPDX-License-Identifier: Apache-2.0
//
// Reference kernels. Every SIMD variant is checked against these for
// bit-identical behavior, so keep them boring.

#include "sortmc/simd_kernels.hpp"
#include "sortmc/rng.hpp"

#include <utility>

namespace sortmc::simd {
namespace {

inline bool record_greater(std::uint64_t ka, std::uint64_t pa,
                           std::uint64_t kb, std::uint64_t pb) {
    return ka > kb || (ka == kb && pa > pb);
}

std::uint64_t cmpswap_asc_scalar(std::uint64_t* keys, std::uint64_t* pays,
                                 std::size_t a, std::size_t b, std::size_t len) {
    std::uint64_t swaps = 0;
    for (std::size_t t = 0; t < len; ++t) {
        if (record_greater(keys[a + t], pays[a + t], keys[b + t], pays[b + t])) {
            std::swap(keys[a + t], keys[b + t]);
            std::swap(pays[a + t], pays[b + t]);
            ++swaps;
        }
    }
    return swaps;
}

std::uint64_t cmpswap_desc_scalar(std::uint64_t* keys, std::uint64_t* pays,
                                  std::size_t a, std::size_t b, std::size_t len) {
    std::uint64_t swaps = 0;
    for (std::size_t t = 0; t < len; ++t) {
        if (record_greater(keys[b + t], pays[b + t], keys[a + t], pays[a + t])) {
            std::swap(keys[a + t], keys[b + t]);
            std::swap(pays[a + t], pays[b + t]);
            ++swaps;
        }
    }
    return swaps;
}

void counter_fill_scalar(std::uint64_t* out, std::size_t len,
                         std::uint64_t base, std::uint64_t start) {
    for (std::size_t i = 0; i < len; ++i)
        out[i] = rng::at(base, start + i);
}

} // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{"scalar", cmpswap_asc_scalar, cmpswap_desc_scalar,
                                   counter_fill_scalar};
    return table;
}

} // namespace sortmc::simd
