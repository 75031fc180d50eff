// Small deterministic parallel-for. Tasks are indexed; reductions must key on
// the index (not completion order) so results are scheduling-independent.
#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace wernerlab {

// Runs body(i) for i in [0, n). Results should be written into preallocated
// per-index slots by the body.
inline void parallel_for(int n, const std::function<void(int)>& body) {
    if (n <= 0) return;
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const int workers = std::min<int>(static_cast<int>(hw), n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            for (int i = w; i < n; i += workers) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace wernerlab
