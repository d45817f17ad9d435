#pragma once

#include <cstddef>
#include <functional>

namespace shp {

/// Runs fn(0..n-1) on up to max_threads workers (<= 0 means hardware
/// concurrency). Indices are partitioned statically, so writes to
/// per-index slots are race-free and results do not depend on the
/// thread count.
void parallel_for(std::size_t n, int max_threads, const std::function<void(std::size_t)>& fn);

}  // namespace shp
