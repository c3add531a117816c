#pragma once

// Thread pool helper with slot-deterministic semantics: workers write into
// preassigned output slots and never reduce across threads, so any
// downstream reduction sees values in canonical index order regardless of
// the thread count.

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace disklab {

// Runs body(i) for i in [0, n).  With threads <= 1 this is a plain loop.
// Work is dealt in contiguous blocks; body must only write to state owned
// by index i.
inline void parallel_for(std::size_t n, unsigned threads,
                         const std::function<void(std::size_t)>& body) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    if (threads > n) threads = static_cast<unsigned>(n);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        std::size_t lo = static_cast<std::size_t>(t) * chunk;
        std::size_t hi = lo + chunk < n ? lo + chunk : n;
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace disklab
