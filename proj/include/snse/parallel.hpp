#pragma once

#include <cstddef>
#include <functional>

namespace snse {

/// Global worker count for path fan-out (1 = sequential). Results never
/// depend on it: each index writes its own slot and reductions run in
/// index order afterwards.
void set_threads(int n);
int thread_count();

/// Runs fn(i) for i in [0, n); block-partitioned across the worker pool.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace snse
