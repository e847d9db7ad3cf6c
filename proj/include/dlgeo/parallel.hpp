#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dlgeo {

/// Worker count from DLGEO_THREADS, else the hardware concurrency.
inline int default_threads() {
    if (const char* env = std::getenv("DLGEO_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

/**
 * Evaluate fn(i) for i in [0, n) and return the results in index order.
 *
 * Work is handed out through an atomic counter, but each result depends only
 * on its index, so the output does not depend on the number of threads.
 * The first exception thrown by any task is rethrown on the caller.
 */
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, int threads, Fn&& fn) {
    std::vector<T> out(n);
    if (threads <= 0) threads = default_threads();
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard lk(err_mu);
                if (!err) err = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
    return out;
}

/// Pairwise sum in a fixed binary tree over the index order.
template <class T, class Add>
T tree_sum(std::vector<T> v, Add add) {
    if (v.empty()) return T{};
    while (v.size() > 1) {
        std::vector<T> next;
        next.reserve((v.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < v.size(); i += 2) next.push_back(add(v[i], v[i + 1]));
        if (v.size() % 2 == 1) next.push_back(v.back());
        v.swap(next);
    }
    return v.front();
}

template <class T>
T tree_sum(std::vector<T> v) {
    return tree_sum(std::move(v), [](const T& a, const T& b) { return a + b; });
}

} // namespace dlgeo
