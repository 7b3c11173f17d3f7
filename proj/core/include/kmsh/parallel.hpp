#pragma once

#include <cstddef>
#include <functional>

namespace kmsh {

// KMS_HODGE_THREADS caps the worker count; 0 or unset means hardware concurrency.
int thread_count();

// Runs body(begin, end) over disjoint chunks of [0, n).
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace kmsh
