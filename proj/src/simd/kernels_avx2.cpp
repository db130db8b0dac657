// SPDX-License-Identifier: Apache-2.0
//
// AVX2 variants of the sort/RNG inner-loop kernels. This translation unit
// is compiled with -mavx2; the dispatcher only routes here after a runtime
// cpuid check, so nothing in this file may be called on non-AVX2 hosts.

#include "sortmc/simd_kernels.hpp"
#include "sortmc/rng.hpp"

#include <immintrin.h>

namespace sortmc::simd {
namespace {

const __m256i kSignBit = _mm256_set1_epi64x(static_cast<long long>(0x8000000000000000ULL));

// Unsigned 64-bit a > b via the usual sign-flip trick around the signed compare.
inline __m256i cmpgt_u64(__m256i a, __m256i b) {
    return _mm256_cmpgt_epi64(_mm256_xor_si256(a, kSignBit), _mm256_xor_si256(b, kSignBit));
}

// Lexicographic (key, payload) greater-than mask.
inline __m256i record_gt(__m256i ka, __m256i pa, __m256i kb, __m256i pb) {
    __m256i kgt = cmpgt_u64(ka, kb);
    __m256i keq = _mm256_cmpeq_epi64(ka, kb);
    __m256i pgt = cmpgt_u64(pa, pb);
    return _mm256_or_si256(kgt, _mm256_and_si256(keq, pgt));
}

template <bool Ascending>
std::uint64_t cmpswap_avx2(std::uint64_t* keys, std::uint64_t* pays,
                           std::size_t a, std::size_t b, std::size_t len) {
    std::uint64_t swaps = 0;
    std::size_t t = 0;
    for (; t + 4 <= len; t += 4) {
        __m256i ka = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(keys + a + t));
        __m256i kb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(keys + b + t));
        __m256i pa = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(pays + a + t));
        __m256i pb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(pays + b + t));

        __m256i m = Ascending ? record_gt(ka, pa, kb, pb) : record_gt(kb, pb, ka, pa);

        _mm256_storeu_si256(reinterpret_cast<__m256i*>(keys + a + t),
                            _mm256_blendv_epi8(ka, kb, m));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(keys + b + t),
                            _mm256_blendv_epi8(kb, ka, m));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(pays + a + t),
                            _mm256_blendv_epi8(pa, pb, m));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(pays + b + t),
                            _mm256_blendv_epi8(pb, pa, m));

        swaps += static_cast<unsigned>(
            __builtin_popcount(_mm256_movemask_pd(_mm256_castsi256_pd(m))));
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

// 64x64 -> low 64 multiply from 32-bit halves (AVX2 has no mullo_epi64).
inline __m256i mullo_u64(__m256i a, __m256i b) {
    __m256i lo = _mm256_mul_epu32(a, b);
    __m256i cross = _mm256_add_epi64(_mm256_mul_epu32(_mm256_srli_epi64(a, 32), b),
                                     _mm256_mul_epu32(a, _mm256_srli_epi64(b, 32)));
    return _mm256_add_epi64(lo, _mm256_slli_epi64(cross, 32));
}

inline __m256i mix64_vec(__m256i x) {
    x = _mm256_xor_si256(x, _mm256_srli_epi64(x, 30));
    x = mullo_u64(x, _mm256_set1_epi64x(static_cast<long long>(0xBF58476D1CE4E5B9ULL)));
    x = _mm256_xor_si256(x, _mm256_srli_epi64(x, 27));
    x = mullo_u64(x, _mm256_set1_epi64x(static_cast<long long>(0x94D049BB133111EBULL)));
    x = _mm256_xor_si256(x, _mm256_srli_epi64(x, 31));
    return x;
}

void counter_fill_avx2(std::uint64_t* out, std::size_t len,
                       std::uint64_t base, std::uint64_t start) {
    const std::uint64_t g = rng::kGamma;
    std::uint64_t c0 = base + start * g;
    __m256i ctr = _mm256_add_epi64(
        _mm256_set1_epi64x(static_cast<long long>(c0)),
        _mm256_set_epi64x(static_cast<long long>(3 * g), static_cast<long long>(2 * g),
                          static_cast<long long>(g), 0));
    const __m256i step = _mm256_set1_epi64x(static_cast<long long>(4 * g));

    std::size_t i = 0;
    for (; i + 4 <= len; i += 4) {
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), mix64_vec(ctr));
        ctr = _mm256_add_epi64(ctr, step);
    }
    for (; i < len; ++i)
        out[i] = rng::at(base, start + i);
}

} // namespace

// Resolved by the dispatcher (which performs the cpuid gate).
const KernelTable* avx2_kernels_impl() {
    static const KernelTable table{"avx2", cmpswap_avx2<true>, cmpswap_avx2<false>,
                                   counter_fill_avx2};
    return &table;
}

} // namespace sortmc::simd
