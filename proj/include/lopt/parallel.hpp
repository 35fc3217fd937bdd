#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace lopt {

/// Worker count: hardware concurrency, capped by the LOPT_THREADS environment variable.
inline std::size_t default_thread_count()
{
    std::size_t n = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    if (const char* cap = std::getenv("LOPT_THREADS")) {
        try {
            const long v = std::stol(cap);
            if (v >= 1) {
                n = std::min<std::size_t>(n, static_cast<std::size_t>(v));
            }
        } catch (const std::exception&) {
        }
    }
    return n;
}

/// Runs body(i) for i in [0, count) on up to `threads` workers. Tasks are
/// claimed from a shared counter; the first exception is rethrown.
template <typename Body>
void parallel_for(std::size_t count, Body&& body, std::size_t threads = default_thread_count())
{
    threads = std::max<std::size_t>(1, std::min(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads - 1);
    for (std::size_t t = 1; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& th : pool) {
        th.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

} // namespace lopt
