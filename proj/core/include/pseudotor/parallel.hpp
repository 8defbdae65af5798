#pragma once

#include <cstdlib>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace pseudotor {

/// Thread budget: hardware concurrency capped by the PSEUDOTOR_THREADS
/// environment variable (values < 1 mean serial execution).
inline int thread_budget() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (const char* env = std::getenv("PSEUDOTOR_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1 && cap < hw) hw = cap;
        if (cap == 1) hw = 1;
    }
    return hw;
}

/// Static block partition of [0, n) over the thread budget. Bodies must
/// write to disjoint slots; results are then independent of scheduling,
/// which keeps every emitted artifact byte-stable.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const int nt = thread_budget();
    if (nt <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + nt - 1) / nt;
    std::vector<std::exception_ptr> errors((n + chunk - 1) / chunk);
    for (int t = 0; t < nt; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        std::exception_ptr* err = &errors[t];
        pool.emplace_back([lo, hi, &body, err] {
            try {
                for (std::size_t i = lo; i < hi; ++i) body(i);
            } catch (...) {
                *err = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);
}

}  // namespace pseudotor
