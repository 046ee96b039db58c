#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace steerseq {

inline constexpr const char *kThreadsEnv = "STEERSEQ_THREADS";

/// Worker count for parameter scans: STEERSEQ_THREADS if set, else the hardware count.
inline std::size_t scan_threads() {
    if (const char *raw = std::getenv(kThreadsEnv); raw != nullptr && *raw != '\0') {
        char *end = nullptr;
        const long value = std::strtol(raw, &end, 10);
        if (end == raw || *end != '\0' || value < 1) {
            throw std::invalid_argument(std::string(kThreadsEnv) + " must be an integer >= 1, got '" +
                                        raw + "'");
        }
        return static_cast<std::size_t>(value);
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/**
 * Calls fn(k) for every k in [0, count), splitting the range into contiguous
 * blocks across threads. fn must only write to state owned by index k, so the
 * merged result does not depend on scheduling. The first exception thrown by
 * any worker is rethrown on the caller's thread.
 */
template <class Fn> void parallel_for(std::size_t count, Fn &&fn, std::size_t threads = scan_threads()) {
    threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, count));
    if (threads == 1) {
        for (std::size_t k = 0; k < count; ++k) {
            fn(k);
        }
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::size_t block = (count + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
        const std::size_t begin = t * block;
        const std::size_t end = std::min(count, begin + block);
        if (begin >= end) {
            break;
        }
        pool.emplace_back([&, begin, end] {
            try {
                for (std::size_t k = begin; k < end; ++k) {
                    fn(k);
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        });
    }
    for (auto &th : pool) {
        th.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

} // namespace steerseq
