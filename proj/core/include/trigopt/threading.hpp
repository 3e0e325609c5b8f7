#pragma once

#include <cstddef>
#include <functional>

namespace trigopt {

/// Runs fn(0) .. fn(n-1) on up to `threads` workers. Iterations must be
/// independent; any exception is rethrown on the caller thread. threads <= 1
/// runs inline. Results must be written by index so the outcome does not
/// depend on scheduling.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace trigopt
