#pragma once

#include <cstddef>
#include <functional>

namespace evo {

/// Worker count used by parallel_for. 0 selects EVO_THREADS or 1.
void set_num_threads(unsigned n);
unsigned num_threads();

/// Runs body(i) for i in [0, n) split into contiguous chunks across workers.
/// Each index is visited exactly once; body must not share mutable state.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace evo
