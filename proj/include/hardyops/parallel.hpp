#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace hardyops {

/// Worker count for data-parallel loops. HARDYOPS_THREADS overrides the
/// hardware count; values below 1 are clamped to 1.
inline int max_threads() {
    static const int cached = [] {
        if (const char* env = std::getenv("HARDYOPS_THREADS")) {
            const int n = std::atoi(env);
            if (n >= 1) return n;
        }
        const unsigned hc = std::thread::hardware_concurrency();
        return hc == 0 ? 1 : static_cast<int>(hc > 16 ? 16 : hc);
    }();
    return cached;
}

/// Runs fn(i) for i in [0, count). Each index writes only its own output
/// slot, and callers reduce those slots in index order afterwards, so
/// results do not depend on the thread count. The first exception thrown
/// by any index stops the loop and is rethrown on the calling thread.
template <class Fn>
void parallel_for(int count, Fn&& fn) {
    const int workers = std::min(max_threads(), count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count && !failed.load(); i = next.fetch_add(1)) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!failed.exchange(true)) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace hardyops
