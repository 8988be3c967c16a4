#pragma once

#include <cstddef>
#include <functional>

namespace gssl::detail {

/// Worker count: hardware concurrency, capped by the SSL_THREADS environment variable.
std::size_t thread_count();

/// Runs body(i) for i in [0, n). Each index must only write its own output slot,
/// so results never depend on the number of workers.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace gssl::detail
