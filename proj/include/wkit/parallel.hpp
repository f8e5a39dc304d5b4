#pragma once

// Order-stable parallel loops over sample grids.

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace wkit {

// Hardware concurrency, capped by the WKIT_THREADS environment variable.
int worker_count();

// out[i] = f(i) for i in [0, n). Rethrows the exception of the lowest
// failing index.
template <class R, class Fn>
std::vector<R> parallel_map(std::size_t n, Fn&& f) {
    std::vector<R> out(n);
    const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(worker_count()), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::mutex m;
    std::size_t failed_at = n;
    std::exception_ptr failure;
    auto run = [&] {
        for (std::size_t i; (i = next++) < n;) {
            try {
                out[i] = f(i);
            } catch (...) {
                std::lock_guard lock(m);
                if (i < failed_at) {
                    failed_at = i;
                    failure = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

}  // namespace wkit
