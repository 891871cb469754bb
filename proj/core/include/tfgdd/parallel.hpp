#pragma once

#include <cstddef>
#include <functional>

namespace tfgdd {

// Process-wide worker count used by parallel_for. Defaults to 1.
// Results are required to be independent of this setting: work items write
// disjoint outputs, and every reduction is performed serially over
// fixed-order partials whose boundaries do not depend on the worker count.
void set_thread_count(int n);
int thread_count();

// Runs fn(i) for each i in [0, n). Work items are claimed dynamically by the
// workers, so fn must only write state owned by item i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace tfgdd
