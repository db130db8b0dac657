// SPDX-License-Identifier: Apache-2.0

#include "sortmc/presort.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sortmc/rng.hpp"
#include "sortmc/simd_kernels.hpp"

namespace sortmc {
namespace {

constexpr std::uint64_t kUniformTag = 0x756E6966; // stream coordinates per generator
constexpr std::uint64_t kSwapTag = 0x73776170;

// Bottom-up merge counting key inversions (strict: key[i] > key[j], i < j).
std::uint64_t count_inversions(std::vector<std::uint64_t>& keys) {
    const std::size_t n = keys.size();
    std::vector<std::uint64_t> tmp(n);
    std::uint64_t inversions = 0;
    for (std::size_t width = 1; width < n; width *= 2) {
        for (std::size_t lo = 0; lo + width < n; lo += 2 * width) {
            const std::size_t mid = lo + width;
            const std::size_t hi = std::min(lo + 2 * width, n);
            std::size_t i = lo, j = mid, k = lo;
            while (i < mid && j < hi) {
                if (keys[j] < keys[i]) {
                    inversions += mid - i;
                    tmp[k++] = keys[j++];
                } else {
                    tmp[k++] = keys[i++];
                }
            }
            while (i < mid)
                tmp[k++] = keys[i++];
            while (j < hi)
                tmp[k++] = keys[j++];
            std::copy(tmp.begin() + lo, tmp.begin() + hi, keys.begin() + lo);
        }
    }
    return inversions;
}

} // namespace

std::vector<KeyRecord> gen_uniform_random(std::size_t n, std::uint64_t seed) {
    std::vector<KeyRecord> out(n);
    if (n == 0)
        return out;
    std::vector<std::uint64_t> raw(n);
    simd::active_kernels().counter_fill(raw.data(), n, rng::stream_base(seed, kUniformTag), 0);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = KeyRecord{rng::bounded(raw[i], n), i};
    return out;
}

std::vector<KeyRecord> gen_partially_sorted(const GenSpec& spec) {
    if (spec.r < 0.0 || spec.r > 1.0)
        throw std::invalid_argument("gen_partially_sorted: swap ratio must be in [0, 1]");
    std::vector<KeyRecord> out(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i)
        out[i] = KeyRecord{i, i};
    if (spec.n == 0)
        return out;

    const auto swaps = static_cast<std::uint64_t>(
        std::floor(static_cast<double>(spec.n) * spec.r));
    rng::Stream stream{rng::stream_base(spec.seed, kSwapTag)};
    for (std::uint64_t s = 0; s < swaps; ++s) {
        std::size_t i = stream.next_below(spec.n);
        std::size_t j = stream.next_below(spec.n);
        std::swap(out[i], out[j]);
    }
    return out;
}

PresortReport presort_report(std::span<const KeyRecord> arr) {
    PresortReport report;
    const std::size_t n = arr.size();
    if (n == 0)
        return report;

    report.sorted_runs = 1;
    for (std::size_t i = 1; i < n; ++i)
        if (arr[i].key < arr[i - 1].key)
            ++report.sorted_runs;

    std::vector<std::uint64_t> keys(n);
    for (std::size_t i = 0; i < n; ++i)
        keys[i] = arr[i].key;
    report.inversions = count_inversions(keys);
    if (n > 1) {
        const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
        report.inversion_fraction = static_cast<double>(report.inversions) / pairs;
    }

    std::vector<KeyRecord> sorted(arr.begin(), arr.end());
    std::sort(sorted.begin(), sorted.end());
    std::size_t displaced = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (!(sorted[i] == arr[i]))
            ++displaced;
    report.displaced_fraction = static_cast<double>(displaced) / static_cast<double>(n);
    return report;
}

} // namespace sortmc
