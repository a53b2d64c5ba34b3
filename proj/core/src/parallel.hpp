#pragma once

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace eitsim::detail {

// Runs fn(0..n-1) over a small worker pool.  Callers keep determinism by
// writing into per-index slots and merging in index order afterwards; the
// schedule only decides who computes what.  The first exception wins, stops
// the dispatch, and is rethrown after the join.
template <typename Fn>
void parallel_for_indexed(int n, Fn&& fn) {
    if (n <= 0) return;
    const unsigned hw = std::thread::hardware_concurrency();
    const int workers =
        static_cast<int>(std::min(hw ? hw : 1u, static_cast<unsigned>(n)));
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    const auto work = [&] {
        while (!failed.load(std::memory_order_relaxed)) {
            const int i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n) break;
            try {
                fn(i);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers) - 1);
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace eitsim::detail
