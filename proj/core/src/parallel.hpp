#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace smlmc::detail {

inline unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, n). Work is claimed dynamically; callers must write
/// results by index so that the outcome does not depend on scheduling.
template <class Fn>
void parallel_for(std::int64_t n, unsigned threads, Fn&& fn) {
    if (n <= 0) return;
    threads = static_cast<unsigned>(
        std::min<std::int64_t>(resolve_threads(threads), n));
    if (threads <= 1) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (;;) {
                        const std::int64_t i = next.fetch_add(1);
                        if (i >= n) break;
                        fn(i);
                    }
                } catch (...) {
                    errors[t] = std::current_exception();
                    next.store(n);
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace smlmc::detail
