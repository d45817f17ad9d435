#include "shp/parallel.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace shp {

void parallel_for(std::size_t n, int max_threads,
                  const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    unsigned workers = max_threads > 0 ? static_cast<unsigned>(max_threads)
                                       : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }

    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) {
        pool.emplace_back([=, &fn] {
            for (std::size_t i = t; i < n; i += workers) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace shp
