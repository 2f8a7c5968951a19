#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace rfad {

/// Runs fn(i) for i in [0, n) across hardware threads with a static
/// interleaved assignment (thread t handles i = t, t + stride, ...).
/// Each index is processed by exactly one thread, so work that writes to
/// disjoint slots per index produces output identical to a sequential loop.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    std::size_t workers = std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    if (workers > n) workers = n;
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) {
        pool.emplace_back([t, n, workers, &fn]() {
            for (std::size_t i = t; i < n; i += workers) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace rfad
