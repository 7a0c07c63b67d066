#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace mvinf {

/// Run `fn(task)` for task = 0..ntasks-1 on up to `threads` workers. Tasks are
/// claimed via an atomic counter; fn must write results into per-task slots so
/// the outcome is independent of scheduling.
inline void parallel_tasks(int ntasks, int threads, const std::function<void(int)>& fn) {
    if (ntasks <= 0) return;
    if (threads < 1) threads = 1;
    int nworkers = std::min(threads, ntasks);
    if (nworkers == 1) {
        for (int t = 0; t < ntasks; ++t) fn(t);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(nworkers));
    for (int w = 0; w < nworkers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                int t = next.fetch_add(1);
                if (t >= ntasks || failed.load()) break;
                try {
                    fn(t);
                } catch (...) {
                    if (!failed.exchange(true)) err = std::current_exception();
                    break;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

} // namespace mvinf
