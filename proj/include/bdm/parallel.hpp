#pragma once

#include <complex>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace bdm {

// Thread count: BDM_THREADS env var, default all cores.
inline unsigned thread_count() {
    if (const char* env = std::getenv("BDM_THREADS")) {
        long n = std::strtol(env, nullptr, 10);
        if (n > 0) return static_cast<unsigned>(n);
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1;
}

// Parallel loop over [0, n). Work items must be independent; results may be
// written to disjoint slots. Falls back to serial for small n.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    unsigned nt = thread_count();
    if (nt <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    if (nt > n) nt = static_cast<unsigned>(n);
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (unsigned t = 0; t < nt; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += nt) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

// Pairwise tree reduction. Summation order is independent of thread count,
// which keeps reports bit-reproducible.
template <typename T>
T tree_sum(std::vector<T> v) {
    if (v.empty()) return T{};
    while (v.size() > 1) {
        std::size_t half = (v.size() + 1) / 2;
        for (std::size_t i = 0; i + half < v.size(); ++i) v[i] += v[i + half];
        v.resize(half);
    }
    return v[0];
}

} // namespace bdm
