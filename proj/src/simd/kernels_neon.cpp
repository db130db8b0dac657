// SPDX-License-Identifier: Apache-2.0
//
// NEON variants (aarch64). Same contracts as the scalar reference.

#include "sortmc/simd_kernels.hpp"
#include "sortmc/rng.hpp"

#include <arm_neon.h>

namespace sortmc::simd {
namespace {

inline uint64x2_t record_gt(uint64x2_t ka, uint64x2_t pa, uint64x2_t kb, uint64x2_t pb) {
    uint64x2_t kgt = vcgtq_u64(ka, kb);
    uint64x2_t keq = vceqq_u64(ka, kb);
    uint64x2_t pgt = vcgtq_u64(pa, pb);
    return vorrq_u64(kgt, vandq_u64(keq, pgt));
}

template <bool Ascending>
std::uint64_t cmpswap_neon(std::uint64_t* keys, std::uint64_t* pays,
                           std::size_t a, std::size_t b, std::size_t len) {
    std::uint64_t swaps = 0;
    std::size_t t = 0;
    for (; t + 2 <= len; t += 2) {
        uint64x2_t ka = vld1q_u64(keys + a + t);
        uint64x2_t kb = vld1q_u64(keys + b + t);
        uint64x2_t pa = vld1q_u64(pays + a + t);
        uint64x2_t pb = vld1q_u64(pays + b + t);

        uint64x2_t m = Ascending ? record_gt(ka, pa, kb, pb) : record_gt(kb, pb, ka, pa);

        vst1q_u64(keys + a + t, vbslq_u64(m, kb, ka));
        vst1q_u64(keys + b + t, vbslq_u64(m, ka, kb));
        vst1q_u64(pays + a + t, vbslq_u64(m, pb, pa));
        vst1q_u64(pays + b + t, vbslq_u64(m, pa, pb));

        swaps += (vgetq_lane_u64(m, 0) & 1u) + (vgetq_lane_u64(m, 1) & 1u);
    }
    for (; t < len; ++t) {
        std::uint64_t ka = keys[a + t], pa = pays[a + t];
        std::uint64_t kb = keys[b + t], pb = pays[b + t];
        bool gt = Ascending ? (ka > kb || (ka == kb && pa > pb))
                            : (kb > ka || (kb == ka && pb > pa));
        if (gt) {
            keys[a + t] = kb; keys[b + t] = ka;
            pays[a + t] = pb; pays[b + t] = pa;
            ++swaps;
        }
    }
    return swaps;
}

// 64x64 -> low 64 multiply via 32-bit widening multiplies.
inline uint64x2_t mullo_u64(uint64x2_t a, uint64x2_t b) {
    uint32x2_t a_lo = vmovn_u64(a);
    uint32x2_t b_lo = vmovn_u64(b);
    uint32x2_t a_hi = vshrn_n_u64(a, 32);
    uint32x2_t b_hi = vshrn_n_u64(b, 32);
    uint64x2_t lo = vmull_u32(a_lo, b_lo);
    uint64x2_t cross = vmlal_u32(vmull_u32(a_hi, b_lo), a_lo, b_hi);
    return vaddq_u64(lo, vshlq_n_u64(cross, 32));
}

inline uint64x2_t mix64_vec(uint64x2_t x) {
    x = veorq_u64(x, vshrq_n_u64(x, 30));
    x = mullo_u64(x, vdupq_n_u64(0xBF58476D1CE4E5B9ULL));
    x = veorq_u64(x, vshrq_n_u64(x, 27));
    x = mullo_u64(x, vdupq_n_u64(0x94D049BB133111EBULL));
    x = veorq_u64(x, vshrq_n_u64(x, 31));
    return x;
}

void counter_fill_neon(std::uint64_t* out, std::size_t len,
                       std::uint64_t base, std::uint64_t start) {
    const std::uint64_t g = rng::kGamma;
    std::uint64_t c0 = base + start * g;
    std::uint64_t lanes[2] = {c0, c0 + g};
    uint64x2_t ctr = vld1q_u64(lanes);
    const uint64x2_t step = vdupq_n_u64(2 * g);

    std::size_t i = 0;
    for (; i + 2 <= len; i += 2) {
        vst1q_u64(out + i, mix64_vec(ctr));
        ctr = vaddq_u64(ctr, step);
    }
    for (; i < len; ++i)
        out[i] = rng::at(base, start + i);
}

} // namespace

const KernelTable* neon_kernels_impl() {
    static const KernelTable table{"neon", cmpswap_neon<true>, cmpswap_neon<false>,
                                   counter_fill_neon};
    return &table;
}

} // namespace sortmc::simd
