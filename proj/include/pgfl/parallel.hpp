#pragma once

#include <cstddef>
#include <functional>

namespace pgfl {

/// Environment variable capping worker threads (positive integer).
inline constexpr const char* kMaxThreadsEnv = "PGFL_MAX_THREADS";

/// Worker count: hardware concurrency, capped by PGFL_MAX_THREADS.
std::size_t worker_count();

/// Runs fn(i) for i in [0, count) over contiguous chunks. Each index is
/// handled by exactly one worker, so results written per index do not depend
/// on the thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace pgfl
