#pragma once

#include <cstddef>
#include <functional>

namespace movdet {

/// Runs body(i) for i in [0, count) on up to `threads` workers. Work is
/// split into contiguous blocks; body must write only to slot i so the
/// result does not depend on the thread count. threads == 0 means one per
/// hardware core. The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace movdet
