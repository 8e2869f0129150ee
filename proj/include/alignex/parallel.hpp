#pragma once

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace alignex::detail {

inline unsigned effective_threads(unsigned requested) {
    if (requested)
        return requested;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1;
}

/// Runs fn(0..count-1) across a small worker pool. Callers keep determinism
/// by writing into per-index slots and merging in index order afterwards.
template <typename Fn>
void parallel_for(size_t count, unsigned threads, Fn&& fn) {
    threads = effective_threads(threads);
    if (threads <= 1 || count <= 1) {
        for (size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    const size_t workers = std::min<size_t>(threads, count);
    for (size_t t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (size_t i = next++; i < count && !failed; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                    failed = true;
                }
            }
        });
    }
    for (std::thread& th : pool)
        th.join();
    if (error)
        std::rethrow_exception(error);
}

}  // namespace alignex::detail
