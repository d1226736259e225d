#pragma once

#include <functional>

#include "types.hpp"

namespace csmri::parallel {

// Worker count for every parallel loop in the library. 0 restores the default
// (hardware concurrency).
void set_threads(int n);
auto threads() -> int;

/*
 * Calls fn(i) for every i in [0, n). Callers guarantee that distinct i write to
 * disjoint memory, so results never depend on the worker count.
 */
void for_each(Index n, std::function<void(Index)> const &fn);

} // namespace csmri::parallel
