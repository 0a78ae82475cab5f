#pragma once

#include <cstddef>
#include <functional>

namespace spherimax::detail {

/// Worker count: SPHERIMAX_THREADS if set and positive, else hardware cores.
std::size_t worker_count();

/// Run fn(i) for i in [0, count) on up to worker_count() threads.
/// Nested calls run serially on the calling thread, so restart-level and
/// sample-level parallelism never oversubscribe. Exceptions from tasks are
/// rethrown on the caller (first one wins).
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace spherimax::detail
