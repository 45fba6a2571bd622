#pragma once

#include <cstddef>
#include <functional>

namespace kanedge {

// Worker cap: KANEDGE_THREADS if set and positive, else hardware concurrency.
unsigned worker_count();

// Runs fn(i) for i in [0, n) across worker_count() threads. Work items must
// not depend on each other; results are written by index so the outcome is
// independent of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace kanedge
