#pragma once

#include <cstddef>
#include <functional>

namespace gswlab {

/// Worker count used by parallel_for. Defaults to the GSWLAB_THREADS
/// environment variable, else std::thread::hardware_concurrency().
std::size_t num_threads();
void set_num_threads(std::size_t n);

/// Calls body(i) for i in [0, n) on up to num_threads() threads. Each index
/// runs exactly once; callers write results into slot i so that the outcome
/// does not depend on scheduling. The first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace gswlab
