#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace qmax {

/// Worker count from QMAX_JOBS, else the hardware concurrency.
inline unsigned default_jobs()
{
    if (const char* env = std::getenv("QMAX_JOBS")) {
        try {
            const long v = std::stol(env);
            if (v > 0)
                return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls body(i) for i in [0, count) on up to `jobs` threads. Indices are
/// handed out dynamically; callers write results by index, so output never
/// depends on scheduling. The first exception thrown is rethrown.
template <class Body>
void parallel_for(std::uint64_t count, unsigned jobs, Body&& body)
{
    jobs = std::max(1u, jobs);
    if (jobs == 1 || count < 2) {
        for (std::uint64_t i = 0; i < count; ++i)
            body(i);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::uint64_t i = next.fetch_add(1);
            if (i >= count)
                return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next.store(count);
            }
        }
    };
    const auto threads = static_cast<unsigned>(std::min<std::uint64_t>(jobs, count));
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back(worker);
    pool.clear();
    if (failure)
        std::rethrow_exception(failure);
}

} // namespace qmax
