#pragma once

#include <cstddef>
#include <functional>

namespace magbeam {

// Worker count: MAGBEAM_THREADS if set and positive, else hardware concurrency.
unsigned default_thread_count();

// Calls body(i) for i in [0, count) on up to `threads` workers (0 = default).
// Each index is visited exactly once; callers write results by index.
// The first exception thrown by a body is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  unsigned threads = 0);

}  // namespace magbeam
