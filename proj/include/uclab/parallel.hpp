#pragma once

#include <cstddef>
#include <functional>

namespace uclab {

/// Worker count from UCLAB_THREADS (default 1).
int thread_count();

/// Forces fixed-order reductions regardless of the worker count.
void set_deterministic(bool on);
bool deterministic();

/// Runs body(begin, end) over contiguous chunks of [0, n).
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

/// Sum of term(i) over [0, n). In deterministic mode the chunking is fixed,
/// so the result does not depend on the worker count.
double parallel_sum(std::size_t n, const std::function<double(std::size_t, std::size_t)>& chunk_sum);

}  // namespace uclab
