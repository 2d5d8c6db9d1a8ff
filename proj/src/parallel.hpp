// parallel.hpp (internal)
#ifndef CONICBUNDLE_PARALLEL_HPP
#define CONICBUNDLE_PARALLEL_HPP

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace conicbundle::detail {

// Runs body(i) for i in [0, n) on up to `threads` workers. Work items are
// independent; callers store results by index so reductions stay ordered.
inline void parallel_for(size_t n, unsigned threads, const std::function<void(size_t)>& body) {
    if (threads <= 1 || n < 2) {
        for (size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    unsigned w = threads < n ? threads : static_cast<unsigned>(n);
    for (unsigned k = 0; k < w; ++k) {
        pool.emplace_back([&] {
            for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace conicbundle::detail

#endif  // CONICBUNDLE_PARALLEL_HPP
