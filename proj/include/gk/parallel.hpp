#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace gk {

/// Runs fn(i) for i in [0, count) on up to `workers` threads. Tasks are
/// handed out in index order; fn must not throw.
template <class Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
    if (count == 0) return;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t task = next++; task < count; task = next++) fn(task);
    };
    const unsigned used = std::max(1u, static_cast<unsigned>(std::min<std::size_t>(workers, count)));
    if (used == 1) {
        worker();
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(used);
    for (unsigned i = 0; i < used; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

}  // namespace gk
