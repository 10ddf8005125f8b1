#pragma once

#include <cstddef>
#include <functional>

namespace sentinel {

/// Worker cap used by parallel_for. Zero means "not set": fall back to
/// SKEL_SENTINEL_THREADS, then to the hardware concurrency.
void set_thread_limit(unsigned threads);
unsigned thread_limit();

/// Runs body(i) for i in [0, count). Each index is visited exactly once;
/// callers write results into per-index slots so output never depends on
/// the worker count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

} // namespace sentinel
