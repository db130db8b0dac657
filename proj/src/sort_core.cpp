// SPDX-License-Identifier: Apache-2.0

#include "sortmc/sort_core.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <utility>

#include "sortmc/simd_kernels.hpp"
#include "sortmc/worker_pool.hpp"

namespace sortmc {
namespace {

constexpr std::size_t kInsertionThreshold = 16;
constexpr std::size_t kParallelGrain = 8192;
constexpr std::size_t kPartialInsertionLimit = 8;

using Clock = std::chrono::steady_clock;

std::uint64_t elapsed_nanos(Clock::time_point t0) {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count());
}

struct Counter {
    std::uint64_t comps = 0;
    std::uint64_t swaps = 0;
};

inline bool less_rec(const KeyRecord& a, const KeyRecord& b, Counter& c) {
    ++c.comps;
    return a < b;
}

void insertion_sort(KeyRecord* lo, KeyRecord* hi, Counter& c) {
    if (lo == hi)
        return;
    for (KeyRecord* cur = lo + 1; cur != hi; ++cur) {
        KeyRecord* sift = cur;
        KeyRecord* sift_1 = cur - 1;
        if (less_rec(*sift, *sift_1, c)) {
            KeyRecord tmp = *sift;
            do {
                *sift-- = *sift_1;
            } while (sift != lo && less_rec(tmp, *--sift_1, c));
            *sift = tmp;
            c.swaps += static_cast<std::uint64_t>(cur - sift);
        }
    }
}

// Insertion sort that gives up once more than kPartialInsertionLimit element
// moves have accumulated. Returns true when the range ended up sorted; a
// sorted range costs exactly one comparison per adjacent pair.
bool partial_insertion_sort(KeyRecord* lo, KeyRecord* hi, Counter& c) {
    if (lo == hi)
        return true;
    std::size_t moved = 0;
    for (KeyRecord* cur = lo + 1; cur != hi; ++cur) {
        if (moved > kPartialInsertionLimit)
            return false;
        KeyRecord* sift = cur;
        KeyRecord* sift_1 = cur - 1;
        if (less_rec(*sift, *sift_1, c)) {
            KeyRecord tmp = *sift;
            do {
                *sift-- = *sift_1;
            } while (sift != lo && less_rec(tmp, *--sift_1, c));
            *sift = tmp;
            moved += static_cast<std::size_t>(cur - sift);
            c.swaps += static_cast<std::uint64_t>(cur - sift);
        }
    }
    return true;
}

void heap_sort(KeyRecord* lo, KeyRecord* hi, Counter& c) {
    auto cmp = [&c](const KeyRecord& a, const KeyRecord& b) { return less_rec(a, b, c); };
    std::make_heap(lo, hi, cmp);
    std::sort_heap(lo, hi, cmp);
    c.swaps += static_cast<std::uint64_t>(hi - lo); // heap moves are untracked; count once per element
}

inline void swap_rec(KeyRecord& a, KeyRecord& b, Counter& c) {
    std::swap(a, b);
    ++c.swaps;
}

// Leaves the median of the three at *lo.
void median3_to_front(KeyRecord* lo, KeyRecord* mid, KeyRecord* back, Counter& c) {
    if (less_rec(*mid, *lo, c))
        swap_rec(*mid, *lo, c);
    if (less_rec(*back, *lo, c))
        swap_rec(*back, *lo, c);
    if (less_rec(*back, *mid, c))
        swap_rec(*back, *mid, c);
    swap_rec(*lo, *mid, c); // median to front as the pivot
}

// Hoare-style partition around *lo; *(hi-1) >= pivot is guaranteed by the
// median-of-three preparation. Reports whether no element had to move,
// which signals an already partitioned (often nearly sorted) range.
struct PartitionResult {
    KeyRecord* pivot_pos;
    bool already_partitioned;
};

PartitionResult partition_right(KeyRecord* lo, KeyRecord* hi, Counter& c) {
    KeyRecord pivot = *lo;
    KeyRecord* first = lo;
    KeyRecord* last = hi;

    while (less_rec(*++first, pivot, c)) {
    }
    if (first - 1 == lo) {
        while (first < last && !less_rec(*--last, pivot, c)) {
        }
    } else {
        while (!less_rec(*--last, pivot, c)) {
        }
    }
    bool already_partitioned = first >= last;

    while (first < last) {
        swap_rec(*first, *last, c);
        while (less_rec(*++first, pivot, c)) {
        }
        while (!less_rec(*--last, pivot, c)) {
        }
    }

    KeyRecord* pivot_pos = first - 1;
    *lo = *pivot_pos;
    *pivot_pos = pivot;
    return {pivot_pos, already_partitioned};
}

void adaptive_loop(KeyRecord* lo, KeyRecord* hi, Counter& c, int depth_budget) {
    for (;;) {
        std::size_t size = static_cast<std::size_t>(hi - lo);
        if (size < kInsertionThreshold) {
            insertion_sort(lo, hi, c);
            return;
        }
        if (depth_budget <= 0) {
            heap_sort(lo, hi, c);
            return;
        }

        median3_to_front(lo, lo + size / 2, hi - 1, c);
        auto [pivot_pos, already_partitioned] = partition_right(lo, hi, c);

        if (already_partitioned && partial_insertion_sort(lo, pivot_pos, c) &&
            partial_insertion_sort(pivot_pos + 1, hi, c))
            return;

        --depth_budget;
        std::size_t l_size = static_cast<std::size_t>(pivot_pos - lo);
        std::size_t r_size = static_cast<std::size_t>(hi - (pivot_pos + 1));
        if (l_size < r_size) {
            adaptive_loop(lo, pivot_pos, c, depth_budget);
            lo = pivot_pos + 1;
        } else {
            adaptive_loop(pivot_pos + 1, hi, c, depth_budget);
            hi = pivot_pos;
        }
    }
}

int depth_limit(std::size_t n) {
    return n > 1 ? 2 * (std::bit_width(n) - 1) : 0;
}

void adaptive_impl(KeyRecord* lo, KeyRecord* hi, Counter& c) {
    std::size_t n = static_cast<std::size_t>(hi - lo);
    if (n < 2)
        return;
    if (n <= kInsertionThreshold) {
        insertion_sort(lo, hi, c);
        return;
    }
    // Adaptive pre-pass: sorted and locally perturbed inputs finish here.
    if (partial_insertion_sort(lo, hi, c))
        return;
    adaptive_loop(lo, hi, c, depth_limit(n));
}

} // namespace

SortStats sort_adaptive(std::span<KeyRecord> arr) {
    SortStats stats;
    auto t0 = Clock::now();
    Counter c;
    adaptive_impl(arr.data(), arr.data() + arr.size(), c);
    stats.comparisons = c.comps;
    stats.swaps = c.swaps;
    stats.threads_used = 1;
    stats.wall_nanos = elapsed_nanos(t0);
    return stats;
}

// ---------------------------------------------------------------------------
// Parallel partition sort: a shared bag of ranges, consumed and refilled by
// the pool. Pivot choice is a pure function of the data, so the partition
// tree -- and therefore the output and the comparison total -- is identical
// for every worker count.

namespace {

struct RangeTask {
    std::size_t lo, hi;
    int depth_budget;
};

struct ParallelState {
    KeyRecord* data;
    std::deque<RangeTask> queue;
    std::mutex mutex;
    std::condition_variable cv;
    unsigned active = 0;

    void push(RangeTask t) {
        {
            std::lock_guard<std::mutex> lock(mutex);
            queue.push_back(t);
        }
        cv.notify_one();
    }
};

void process_range(ParallelState& state, RangeTask task, Counter& c) {
    KeyRecord* base = state.data;
    for (;;) {
        std::size_t size = task.hi - task.lo;
        if (size <= kParallelGrain) {
            adaptive_impl(base + task.lo, base + task.hi, c);
            return;
        }
        if (task.depth_budget <= 0) {
            heap_sort(base + task.lo, base + task.hi, c);
            return;
        }
        KeyRecord* lo = base + task.lo;
        KeyRecord* hi = base + task.hi;
        median3_to_front(lo, lo + size / 2, hi - 1, c);
        auto [pivot_pos, already] = partition_right(lo, hi, c);
        (void)already;
        std::size_t split = static_cast<std::size_t>(pivot_pos - base);
        state.push({task.lo, split, task.depth_budget - 1});
        task = {split + 1, task.hi, task.depth_budget - 1};
    }
}

void parallel_worker(ParallelState& state, Counter& c) {
    std::unique_lock<std::mutex> lock(state.mutex);
    for (;;) {
        while (state.queue.empty()) {
            if (state.active == 0)
                return; // queue drained and nobody can refill it
            state.cv.wait(lock);
        }
        RangeTask task = state.queue.front();
        state.queue.pop_front();
        ++state.active;
        lock.unlock();

        process_range(state, task, c);

        lock.lock();
        --state.active;
        if (state.queue.empty() && state.active == 0)
            state.cv.notify_all();
    }
}

} // namespace

SortStats sort_parallel(std::span<KeyRecord> arr, unsigned workers) {
    if (workers == 0)
        throw std::invalid_argument("sort_parallel: workers must be >= 1");

    SortStats stats;
    stats.threads_used = workers;
    auto t0 = Clock::now();

    if (arr.size() <= kParallelGrain || workers == 1) {
        Counter c;
        if (arr.size() <= kParallelGrain) {
            adaptive_impl(arr.data(), arr.data() + arr.size(), c);
        } else {
            ParallelState state;
            state.data = arr.data();
            state.queue.push_back({0, arr.size(), depth_limit(arr.size())});
            parallel_worker(state, c);
        }
        stats.comparisons = c.comps;
        stats.swaps = c.swaps;
        stats.wall_nanos = elapsed_nanos(t0);
        return stats;
    }

    ParallelState state;
    state.data = arr.data();
    state.queue.push_back({0, arr.size(), depth_limit(arr.size())});
    std::vector<Counter> counters(workers);
    {
        WorkerPool pool(workers);
        pool.dispatch([&](unsigned w) { parallel_worker(state, counters[w]); });
    }
    for (const Counter& c : counters) {
        stats.comparisons += c.comps;
        stats.swaps += c.swaps;
    }
    stats.wall_nanos = elapsed_nanos(t0);
    return stats;
}

// ---------------------------------------------------------------------------
// Bitonic network.

std::size_t next_power_of_two(std::size_t n) {
    return std::bit_ceil(n == 0 ? std::size_t{1} : n);
}

std::vector<KeyRecord> pad_to_power_of_two(std::span<const KeyRecord> arr) {
    std::vector<KeyRecord> out(arr.begin(), arr.end());
    out.resize(next_power_of_two(arr.size()), KeyRecord{sentinel_key, sentinel_payload});
    return out;
}

std::vector<BitonicStage> bitonic_stage_schedule(std::size_t n_pow2) {
    if (n_pow2 < 2 || !std::has_single_bit(n_pow2))
        throw std::invalid_argument("bitonic_stage_schedule: length must be a power of two >= 2");
    std::vector<BitonicStage> stages;
    for (std::uint64_t span = 2; span <= n_pow2; span <<= 1)
        for (std::uint64_t dist = span >> 1; dist > 0; dist >>= 1)
            stages.push_back({span, dist});
    return stages;
}

std::vector<BitonicComparator> stage_comparators(const BitonicStage& stage,
                                                 std::size_t n_pow2) {
    std::vector<BitonicComparator> out;
    out.reserve(n_pow2 / 2);
    const std::size_t dist = stage.distance;
    for (std::size_t base = 0; base < n_pow2; base += 2 * dist) {
        bool ascending = (base & stage.merge_span) == 0;
        for (std::size_t off = 0; off < dist; ++off)
            out.push_back({base + off, base + off + dist, ascending});
    }
    return out;
}

namespace {

// Short-stride stages (kernel calls would be one or two lanes each).
// Branchless select keeps the cost independent of the data, which the
// network's obliviousness contract extends to wall time.
template <std::size_t kDist>
std::uint64_t run_stage_short_stride(std::uint64_t* keys, std::uint64_t* pays,
                                     const BitonicStage& stage, std::size_t lane_lo,
                                     std::size_t lane_hi) {
    constexpr std::size_t dist = kDist;
    std::uint64_t swaps = 0;
    for (std::size_t t = lane_lo; t < lane_hi; ++t) {
        const std::size_t base = (t / dist) * 2 * dist;
        const std::size_t a = base + (t % dist);
        const std::size_t b = a + dist;
        const std::uint64_t ka = keys[a], kb = keys[b];
        const std::uint64_t pa = pays[a], pb = pays[b];
        // bitwise bools: no short-circuit branches on the data
        const unsigned eq = static_cast<unsigned>(ka == kb);
        const unsigned a_gt_b = static_cast<unsigned>(ka > kb) |
                                (eq & static_cast<unsigned>(pa > pb));
        const unsigned b_gt_a = static_cast<unsigned>(kb > ka) |
                                (eq & static_cast<unsigned>(pb > pa));
        const unsigned asc = static_cast<unsigned>((base & stage.merge_span) == 0);
        const unsigned do_swap = (asc & a_gt_b) | ((asc ^ 1u) & b_gt_a);
        const std::uint64_t m = -static_cast<std::uint64_t>(do_swap);
        keys[a] = (ka & ~m) | (kb & m);
        keys[b] = (kb & ~m) | (ka & m);
        pays[a] = (pa & ~m) | (pb & m);
        pays[b] = (pb & ~m) | (pa & m);
        swaps += do_swap;
    }
    return swaps;
}

// Executes one stage over the lane range [lane_lo, lane_hi); lane t maps to
// the comparator (base + off, base + off + dist) with base = (t/dist)*2*dist.
std::uint64_t run_stage_lanes(std::uint64_t* keys, std::uint64_t* pays,
                              const BitonicStage& stage, std::size_t lane_lo,
                              std::size_t lane_hi, const simd::KernelTable& kern) {
    const std::size_t dist = stage.distance;
    if (dist == 1)
        return run_stage_short_stride<1>(keys, pays, stage, lane_lo, lane_hi);
    if (dist == 2)
        return run_stage_short_stride<2>(keys, pays, stage, lane_lo, lane_hi);
    std::uint64_t swaps = 0;
    std::size_t t = lane_lo;
    while (t < lane_hi) {
        std::size_t off = t % dist;
        std::size_t base = (t / dist) * 2 * dist;
        std::size_t len = std::min(dist - off, lane_hi - t);
        bool ascending = (base & stage.merge_span) == 0;
        std::size_t a = base + off;
        swaps += (ascending ? kern.cmpswap_asc : kern.cmpswap_desc)(keys, pays, a, a + dist, len);
        t += len;
    }
    return swaps;
}

} // namespace

SortStats sort_bitonic(std::span<KeyRecord> arr, unsigned workers) {
    if (workers == 0)
        throw std::invalid_argument("sort_bitonic: workers must be >= 1");

    SortStats stats;
    stats.threads_used = workers;
    auto t0 = Clock::now();

    const std::size_t n = arr.size();
    const std::size_t padded = next_power_of_two(n);
    const unsigned k = static_cast<unsigned>(std::bit_width(padded) - 1);
    stats.stages = static_cast<std::uint64_t>(k) * (k + 1) / 2;
    stats.comparisons = stats.stages * (padded / 2);

    if (padded < 2) {
        stats.wall_nanos = elapsed_nanos(t0);
        return stats;
    }

    // Split layout: the compare-exchange kernels work on separate key and
    // payload streams.
    std::vector<std::uint64_t> keys(padded, sentinel_key);
    std::vector<std::uint64_t> pays(padded, sentinel_payload);
    for (std::size_t i = 0; i < n; ++i) {
        keys[i] = arr[i].key;
        pays[i] = arr[i].payload;
    }

    const simd::KernelTable& kern = simd::active_kernels();
    const std::size_t lanes = padded / 2;
    const auto schedule = bitonic_stage_schedule(padded);

    if (workers == 1 || lanes < 2048) {
        for (const BitonicStage& stage : schedule)
            stats.swaps += run_stage_lanes(keys.data(), pays.data(), stage, 0, lanes, kern);
    } else {
        WorkerPool pool(workers);
        std::vector<std::uint64_t> swaps(workers, 0);
        for (const BitonicStage& stage : schedule) {
            // Stage barrier: parallel_for joins before the next stage starts.
            pool.parallel_for(lanes, [&](unsigned w, std::size_t lo, std::size_t hi) {
                swaps[w] += run_stage_lanes(keys.data(), pays.data(), stage, lo, hi, kern);
            });
        }
        for (std::uint64_t s : swaps)
            stats.swaps += s;
    }

    // Sentinels sorted to the tail; the first n slots are the genuine records.
    for (std::size_t i = 0; i < n; ++i)
        arr[i] = KeyRecord{keys[i], pays[i]};

    stats.wall_nanos = elapsed_nanos(t0);
    return stats;
}

} // namespace sortmc
