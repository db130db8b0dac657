// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace sortmc::rng {

// Weyl increment of the splitmix64 sequence.
inline constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

/// splitmix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

/// The n-th output of the splitmix64 stream anchored at `base`.
/// Counter addressing is what makes every draw independently
/// reachable, so generation parallelizes and replays exactly.
constexpr std::uint64_t at(std::uint64_t base, std::uint64_t n) {
    return mix64(base + n * kGamma);
}

/// Derives a stream base from up to three stream coordinates.
constexpr std::uint64_t stream_base(std::uint64_t seed, std::uint64_t a = 0,
                                    std::uint64_t b = 0) {
    return mix64(seed ^ mix64(a ^ mix64(b ^ 0xA0761D6478BD642FULL)));
}

/// Maps a 64-bit word to [0, n) without modulo bias worth caring about
/// (bias < n / 2^64). Multiply-shift reduction.
constexpr std::uint64_t bounded(std::uint64_t x, std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(x) * static_cast<unsigned __int128>(n)) >> 64);
}

/// Double in [0, 1) with 53 random bits.
constexpr double to_unit(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

/// Counter-based stream: the counter is the only mutable state, so a
/// particle can carry it across event passes and any processing order
/// reproduces the same draw sequence.
struct Stream {
    std::uint64_t base = 0;
    std::uint64_t counter = 0;

    std::uint64_t next_u64() { return at(base, ++counter); }
    double next_unit() { return to_unit(next_u64()); }
    std::uint64_t next_below(std::uint64_t n) { return bounded(next_u64(), n); }
};

} // namespace sortmc::rng
