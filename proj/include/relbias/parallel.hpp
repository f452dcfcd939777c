#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace relbias {

/// Calls body(i) for i in [0, count) on up to `threads` workers. The first
/// exception (lowest index wins among those observed) is rethrown after all
/// workers join.
template <typename Body>
void parallel_for(std::size_t count, int threads, Body&& body) {
    const auto workers = static_cast<std::size_t>(std::clamp<long long>(threads, 1, static_cast<long long>(count ? count : 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    std::size_t error_index = count;
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (i < error_index) {
                    error_index = i;
                    error = std::current_exception();
                }
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    pool.clear();
    if (error) std::rethrow_exception(error);
}

} // namespace relbias
