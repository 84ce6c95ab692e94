#pragma once

#include <cstddef>
#include <functional>

namespace covertnet {

/// Worker thread cap from COVERTNET_THREADS (unset or 0 = hardware concurrency).
std::size_t thread_count();

/// Runs body(i) for i in [0, n). Each index runs exactly once; the first
/// exception by index order is rethrown after all threads join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace covertnet
