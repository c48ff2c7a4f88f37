#pragma once

#include <cstddef>
#include <functional>

namespace demotrace {

// Worker count used by every parallel loop in the library. Results never
// depend on it: loops only write to disjoint, index-addressed outputs.
void set_thread_count(int threads);
int thread_count();

// Calls fn(i) for every i in [begin, end), split into contiguous chunks.
void parallel_for(std::size_t begin, std::size_t end, const std::function<void(std::size_t)>& fn);

}  // namespace demotrace
