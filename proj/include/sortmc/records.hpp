// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string_view>

namespace sortmc {

/// Sortable (key, payload-index) pair. The payload indexes an external
/// record bank; payloads within one array are unique, which makes the
/// lexicographic (key, payload) order total and every correct sort of the
/// same input byte-identical.
struct KeyRecord {
    std::uint64_t key;
    std::uint64_t payload;

    friend constexpr bool operator==(const KeyRecord&, const KeyRecord&) = default;
    friend constexpr bool operator<(const KeyRecord& a, const KeyRecord& b) {
        return a.key < b.key || (a.key == b.key && a.payload < b.payload);
    }
};

/// Padding sentinel appended by pad_to_power_of_two. Genuine records must
/// keep key < sentinel_key so sentinels sort last.
inline constexpr std::uint64_t sentinel_key = UINT64_MAX;
inline constexpr std::uint64_t sentinel_payload = UINT64_MAX;

constexpr bool is_padding(const KeyRecord& r) {
    return r.key == sentinel_key && r.payload == sentinel_payload;
}

/// Device-agnostic cost model for one sort invocation.
/// stages is nonzero only for the bitonic network, where it equals
/// k(k+1)/2 for padded length 2^k regardless of input values.
struct SortStats {
    std::uint64_t comparisons = 0;
    std::uint64_t swaps = 0;
    std::uint64_t stages = 0;
    std::uint64_t wall_nanos = 0;
    std::uint32_t threads_used = 1;
};

enum class AlgorithmId {
    AdaptiveSingleThread,
    PartitionMultiThread,
    BitonicNetwork,
};

constexpr std::string_view algorithm_name(AlgorithmId id) {
    switch (id) {
        case AlgorithmId::AdaptiveSingleThread: return "adaptive";
        case AlgorithmId::PartitionMultiThread: return "parallel";
        case AlgorithmId::BitonicNetwork: return "bitonic";
    }
    return "unknown";
}

} // namespace sortmc
