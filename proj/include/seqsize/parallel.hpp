#pragma once

#include <algorithm>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace seqsize {

// Runs fn(i) for i in [0, count) across `threads` workers (0 = hardware
// concurrency). Work is striped by index; callers must write results into
// index-addressed slots so the outcome is identical for any worker count.
// The first exception thrown by any worker is rethrown on the caller.
inline void parallel_for(long count, int threads, const std::function<void(long)>& fn) {
    if (count <= 0) return;
    unsigned n_threads = threads > 0 ? static_cast<unsigned>(threads) : std::thread::hardware_concurrency();
    if (n_threads == 0) n_threads = 1;
    n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(count));

    if (n_threads == 1) {
        for (long i = 0; i < count; ++i) fn(i);
        return;
    }

    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (unsigned w = 0; w < n_threads; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (long i = w; i < count; i += n_threads) fn(i);
            } catch (...) {
                std::scoped_lock lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace seqsize
