#pragma once

#include <cstddef>
#include <functional>

namespace kteka {

/// Worker count to use for `requested` (0 = KTEKA_JOBS env var, else the
/// hardware concurrency). Always >= 1.
unsigned resolve_jobs(unsigned requested);

/// Runs body(i) for i in [0, count) on up to `jobs` threads.
///
/// Each index is processed exactly once and callers write results into
/// per-index slots, so outputs never depend on the worker count. The first
/// exception thrown by any body is rethrown on the calling thread.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& body);

}  // namespace kteka
