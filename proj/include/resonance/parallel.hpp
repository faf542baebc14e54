#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace resonance {

inline std::atomic<unsigned>& default_threads_slot()
{
    static std::atomic<unsigned> n{0};
    return n;
}

// 0 means hardware concurrency.
inline void set_default_threads(unsigned n) { default_threads_slot() = n; }

inline unsigned default_threads()
{
    const unsigned n = default_threads_slot();
    if (n > 0) return n;
    return std::max(1u, std::thread::hardware_concurrency());
}

// Runs f(i) for i in [0, count); rethrows the first exception after all workers stop.
template <class F>
void parallel_for(std::size_t count, F&& f, unsigned threads = 0)
{
    if (threads == 0) threads = default_threads();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex mu;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next++;
            if (i >= count) return;
            try {
                f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!error) error = std::current_exception();
                next = count;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace resonance
