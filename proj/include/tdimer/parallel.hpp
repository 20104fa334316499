#pragma once

// Fixed-size fork/join over an index range. Results must be written to
// per-index slots so aggregates do not depend on scheduling.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace tdimer {

inline std::atomic<std::size_t>& thread_override() {
    static std::atomic<std::size_t> n{0};
    return n;
}

/// Overrides the environment for the rest of the process (0 restores it).
inline void set_default_threads(std::size_t n) { thread_override() = n; }

/// set_default_threads value, else TDIMER_THREADS if set to a positive
/// integer, else the hardware concurrency.
inline std::size_t default_threads() {
    if (const std::size_t n = thread_override()) return n;
    if (const char* env = std::getenv("TDIMER_THREADS")) {
        try {
            const long n = std::stol(env);
            if (n > 0) return static_cast<std::size_t>(n);
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls body(i) for i in [0, n) on up to `threads` workers (0 = default).
/// The first exception thrown by any call is rethrown after all workers join.
template <class Body>
void parallel_for(std::size_t n, Body&& body, std::size_t threads = 0) {
    if (threads == 0) threads = default_threads();
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = n;
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
    pool.clear();
    if (error) std::rethrow_exception(error);
}

}  // namespace tdimer
