#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace cnnrules {

// Worker cap for parallel loops. Results never depend on it: parallel
// sections only fill disjoint per-index slots, all reductions stay serial.
int worker_count();
void set_worker_count(int n);

// Runs fn(i) for i in [0, n). Chunked across workers; fn must only touch
// state owned by index i.
template <typename F>
void parallel_for(std::size_t n, F&& fn) {
    const int workers = worker_count();
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
    const std::size_t chunk = (n + nthreads - 1) / nthreads;
    std::vector<std::thread> pool;
    pool.reserve(nthreads - 1);
    auto run = [&fn, n](std::size_t lo, std::size_t hi) {
        hi = std::min(hi, n);
        for (std::size_t i = lo; i < hi; ++i) fn(i);
    };
    for (std::size_t t = 1; t < nthreads; ++t) pool.emplace_back(run, t * chunk, (t + 1) * chunk);
    run(0, chunk);
    for (auto& th : pool) th.join();
}

}  // namespace cnnrules
