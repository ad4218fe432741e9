#pragma once

// Index-ordered parallel map. Results land at their input index, so output
// order never depends on scheduling.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace logitdyn {

inline std::size_t default_workers() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

template <class F>
auto parallel_map(std::size_t count, F&& f, std::size_t workers = 0) {
    using R = std::invoke_result_t<F&, std::size_t>;
    std::vector<R> out(count);
    if (workers == 0) workers = default_workers();
    workers = std::min(workers, count);
    if (workers <= 1) {
        for (std::size_t k = 0; k < count; ++k) out[k] = f(k);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < count;) {
            try {
                out[k] = f(k);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = count;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

}  // namespace logitdyn
