#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rabitrack {

/// Runs fn(i) for i in [0, n) on up to n_threads workers. Tasks pull the next
/// index from a shared counter; results must be written by index so the
/// output is identical for any thread count. The first exception thrown by a
/// task is rethrown on the calling thread.
template <typename Fn>
void parallel_for_index(std::size_t n, int n_threads, Fn&& fn) {
    if (n == 0) return;
    const unsigned hw = std::thread::hardware_concurrency();
    std::size_t workers = n_threads > 0 ? static_cast<std::size_t>(n_threads)
                                        : (hw > 0 ? hw : 1);
    if (workers > n) workers = n;
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n || failed.load(std::memory_order_relaxed)) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace rabitrack
