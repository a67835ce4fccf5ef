#pragma once

#include <cstddef>
#include <functional>

namespace pathkernel {

/// Runs body(i) for i in [0, count) on up to `workers` threads using static
/// contiguous blocks. The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace pathkernel
