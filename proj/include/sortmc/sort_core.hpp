// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sortmc/records.hpp"

namespace sortmc {

/// Single-threaded introspective sort: quicksort with a 2*floor(log2 n)
/// depth budget before heapsort, insertion sort below 16 elements, and an
/// adaptive insertion pre-pass so nearly sorted inputs cost close to one
/// comparison per adjacent pair.
SortStats sort_adaptive(std::span<KeyRecord> arr);

/// Multi-threaded recursive partition sort. Subranges above the grain size
/// go to a worker pool; below it the adaptive scheme finishes the range.
/// Output is identical for every worker count. Throws std::invalid_argument
/// when workers == 0. Worst case inherits quicksort's O(n^2).
SortStats sort_parallel(std::span<KeyRecord> arr, unsigned workers);

/// Data-oblivious bitonic network, stage-synchronous: all comparators of a
/// stage run (in parallel across workers) before the next stage starts.
/// Non-power-of-two inputs are padded internally with maximal sentinels;
/// the input span receives the sorted genuine records. The comparator
/// pattern, stage count k(k+1)/2 and comparison count depend on the padded
/// length only, never on the data.
SortStats sort_bitonic(std::span<KeyRecord> arr, unsigned workers = 1);

/// Smallest power-of-two extension of arr, filled with padding sentinels.
/// Length 0 yields a single sentinel so sweep drivers stay total.
std::vector<KeyRecord> pad_to_power_of_two(std::span<const KeyRecord> arr);

/// One comparator stage: merge_span selects the sort direction per block
/// ((lo & merge_span) == 0 means ascending), distance is the lane stride.
struct BitonicStage {
    std::uint64_t merge_span;
    std::uint64_t distance;
};

struct BitonicComparator {
    std::size_t lo;
    std::size_t hi;
    bool ascending;
};

/// The k(k+1)/2 stages of the network for n_pow2 = 2^k elements.
/// Throws std::invalid_argument unless n_pow2 is a power of two >= 2.
std::vector<BitonicStage> bitonic_stage_schedule(std::size_t n_pow2);

/// Materializes a stage's n_pow2/2 disjoint comparator triples (test aid).
std::vector<BitonicComparator> stage_comparators(const BitonicStage& stage,
                                                 std::size_t n_pow2);

std::size_t next_power_of_two(std::size_t n);

} // namespace sortmc
