#pragma once

#include <cstddef>
#include <functional>

namespace uncertain_eval {

// Thread cap from UNCERTAIN_EVAL_THREADS; 0 or unset means hardware concurrency.
std::size_t configured_threads();

/// Runs task(i) for i in [0, count) on up to `threads` workers (0 = configured).
/// Tasks must write only to state owned by their index. The first exception
/// thrown by a task is rethrown after all workers join.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& task);

} // namespace uncertain_eval
