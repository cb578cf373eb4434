#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace perpetuity {

// Runs fn(chunk, begin, end) over [0, n) cut into fixed-size chunks. Chunks
// are claimed dynamically, so fn must only write to its own index range.
template <class Fn>
void for_each_chunk(std::size_t n, std::size_t chunk_size, unsigned threads, Fn&& fn) {
    if (n == 0) return;
    chunk_size = std::max<std::size_t>(chunk_size, 1);
    const std::size_t n_chunks = (n + chunk_size - 1) / chunk_size;
    auto run_one = [&](std::size_t c) {
        const std::size_t begin = c * chunk_size;
        fn(c, begin, std::min(n, begin + chunk_size));
    };
    if (threads <= 1 || n_chunks == 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) run_one(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::jthread> pool;
    const unsigned n_workers = static_cast<unsigned>(std::min<std::size_t>(threads, n_chunks));
    pool.reserve(n_workers);
    for (unsigned t = 0; t < n_workers; ++t) {
        pool.emplace_back([&] {
            for (std::size_t c = next++; c < n_chunks; c = next++) {
                try {
                    run_one(c);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    pool.clear();
    if (error) std::rethrow_exception(error);
}

inline unsigned default_thread_count() noexcept {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

}  // namespace perpetuity
