#pragma once

#include <cstddef>
#include <functional>

namespace rpsvm {

// Worker count: RPSVM_THREADS if set, else hardware concurrency.
size_t thread_count();
void set_thread_count(size_t n);  // 0 restores the default

// Runs fn(i) for i in [begin, end) on a static block partition. Callers must
// write only to disjoint per-index slots so results are schedule-independent.
void parallel_for(size_t begin, size_t end, const std::function<void(size_t)>& fn);

}  // namespace rpsvm
