// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace sortmc {

/// Fixed-size pool with fork/join dispatch. The constructing thread
/// participates as worker 0, so WorkerPool(1) spawns no threads at all.
/// Callers are responsible for making their work deterministic under any
/// partitioning; the pool itself guarantees nothing about interleaving.
class WorkerPool {
public:
    explicit WorkerPool(unsigned workers);
    ~WorkerPool();

    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    unsigned workers() const { return worker_count_; }

    /// Runs body(worker_index) on every worker; returns when all finished.
    void dispatch(const std::function<void(unsigned)>& body);

    /// Splits [0, n) into one contiguous chunk per worker.
    /// fn(worker_index, begin, end); empty chunks are skipped.
    void parallel_for(std::size_t n,
                      const std::function<void(unsigned, std::size_t, std::size_t)>& fn);

private:
    void thread_main(unsigned index);

    unsigned worker_count_;
    std::vector<std::thread> threads_;
    std::mutex mutex_;
    std::condition_variable start_cv_;
    std::condition_variable done_cv_;
    const std::function<void(unsigned)>* job_ = nullptr;
    std::uint64_t generation_ = 0;
    unsigned remaining_ = 0;
    bool shutdown_ = false;
};

} // namespace sortmc
