// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sortmc/records.hpp"

namespace sortmc {

/// Input recipe for a partially sorted array: the identity permutation
/// 0..n-1 with floor(n*r) random pair swaps applied.
struct GenSpec {
    std::size_t n = 0;
    double r = 0.0; // swap ratio in [0, 1]
    std::uint64_t seed = 0;
};

/// Disorder metrics of a key sequence.
struct PresortReport {
    double inversion_fraction = 0.0; // inversions / (n(n-1)/2)
    std::uint64_t sorted_runs = 0;   // maximal non-decreasing runs (0 for empty)
    double displaced_fraction = 0.0; // records not at their sorted index
    std::uint64_t inversions = 0;
};

/// n records with keys independently uniform on [0, n-1], payload = index.
/// Deterministic in (n, seed); bulk key material comes from the dispatched
/// counter_fill kernel.
std::vector<KeyRecord> gen_uniform_random(std::size_t n, std::uint64_t seed);

/// Identity array with exactly floor(n*r) swaps of index pairs sampled
/// uniformly with replacement (a coincident pair is a counted no-op).
/// Throws std::invalid_argument when r is outside [0, 1].
std::vector<KeyRecord> gen_partially_sorted(const GenSpec& spec);

/// Merge-count inversion measurement, O(n log n), plus run and
/// displacement statistics.
PresortReport presort_report(std::span<const KeyRecord> arr);

} // namespace sortmc
