#pragma once

#include <cstddef>
#include <functional>

namespace trady {

// Thread cap from TRADY_THREADS (default 1), read once.
int max_threads();

// Runs fn(i) for i in [0,n). With t threads the range is split into t
// contiguous chunks, one thread each. Callers must only write to
// i-disjoint locations, so results are bit-identical for any thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace trady
