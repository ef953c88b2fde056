#include "cnnrules/threads.hpp"

#include <atomic>

namespace cnnrules {

namespace {
std::atomic<int> g_workers{0};  // 0 = not set yet, fall back to hardware
}

int worker_count() {
    const int n = g_workers.load(std::memory_order_relaxed);
    if (n > 0) return n;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void set_worker_count(int n) { g_workers.store(n < 1 ? 1 : n, std::memory_order_relaxed); }

}  // namespace cnnrules
