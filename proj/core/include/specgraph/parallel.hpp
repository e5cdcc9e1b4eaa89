#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace specgraph {

// Chunked parallel loop over [0, n); results must be written to
// index-addressed storage so the outcome is independent of the thread count.
inline void parallel_for(std::size_t n, int threads,
                         const std::function<void(std::size_t)>& body) {
    unsigned hw = std::thread::hardware_concurrency();
    std::size_t nt = threads > 0 ? static_cast<std::size_t>(threads)
                                 : std::max(1u, hw);
    nt = std::min(nt, n == 0 ? std::size_t{1} : n);
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (std::size_t w = 0; w < nt; ++w) {
        pool.emplace_back([&, w]() {
            for (std::size_t i = w; i < n; i += nt) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace specgraph
