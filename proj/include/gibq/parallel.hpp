#pragma once

#include <cstddef>
#include <functional>

namespace gibq {

/// Worker cap for all parallel loops. Defaults to the hardware concurrency,
/// overridden by the GIBQ_THREADS environment variable when set.
std::size_t thread_count();
void set_thread_count(std::size_t n);

/// Runs body(i) for i in [0, n). Each index is processed exactly once and
/// writes only to its own output slot, so results do not depend on the
/// schedule.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace gibq
