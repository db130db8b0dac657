// SPDX-License-Identifier: Apache-2.0

#include "sortmc/worker_pool.hpp"

#include <stdexcept>

namespace sortmc {

WorkerPool::WorkerPool(unsigned workers) : worker_count_(workers) {
    if (workers == 0)
        throw std::invalid_argument("WorkerPool: workers must be >= 1");
    threads_.reserve(workers - 1);
    for (unsigned i = 1; i < workers; ++i)
        threads_.emplace_back(&WorkerPool::thread_main, this, i);
}

WorkerPool::~WorkerPool() {
    {
        std::lock_guard<std::mutex> lock(mutex_);
        shutdown_ = true;
    }
    start_cv_.notify_all();
    for (auto& t : threads_)
        t.join();
}

void WorkerPool::dispatch(const std::function<void(unsigned)>& body) {
    if (worker_count_ == 1) {
        body(0);
        return;
    }
    {
        std::lock_guard<std::mutex> lock(mutex_);
        job_ = &body;
        remaining_ = worker_count_ - 1;
        ++generation_;
    }
    start_cv_.notify_all();
    body(0);
    std::unique_lock<std::mutex> lock(mutex_);
    done_cv_.wait(lock, [this] { return remaining_ == 0; });
    job_ = nullptr;
}

void WorkerPool::thread_main(unsigned index) {
    std::uint64_t seen = 0;
    for (;;) {
        const std::function<void(unsigned)>* job = nullptr;
        {
            std::unique_lock<std::mutex> lock(mutex_);
            start_cv_.wait(lock, [&] { return shutdown_ || generation_ != seen; });
            if (shutdown_)
                return;
            seen = generation_;
            job = job_;
        }
        (*job)(index);
        {
            std::lock_guard<std::mutex> lock(mutex_);
            if (--remaining_ == 0)
                done_cv_.notify_all();
        }
    }
}

void WorkerPool::parallel_for(
    std::size_t n, const std::function<void(unsigned, std::size_t, std::size_t)>& fn) {
    if (n == 0)
        return;
    if (worker_count_ == 1) {
        fn(0, 0, n);
        return;
    }
    const std::size_t chunk = (n + worker_count_ - 1) / worker_count_;
    dispatch([&](unsigned w) {
        std::size_t begin = static_cast<std::size_t>(w) * chunk;
        std::size_t end = begin + chunk < n ? begin + chunk : n;
        if (begin < end)
            fn(w, begin, end);
    });
}

} // namespace sortmc
