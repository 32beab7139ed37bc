#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "bcdi/grid.hpp"

namespace bcdi {

/// Caps library-level parallelism for the lifetime of the process (0 = TBB default).
/// Results never depend on this value: per-item work writes to its own slot
/// and reductions run in a fixed order.
void set_thread_count(std::size_t n);
std::size_t thread_count();

/// Reads BCDI_THREADS; returns 0 when unset or unparsable.
std::size_t thread_count_from_env();

/// Calls fn(i) for i in [0, n), possibly concurrently.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Pairwise (tree) sum in a fixed order, so the bits do not depend on how
/// the terms were produced. Empty input is an error.
RealGrid pairwise_sum(std::span<const RealGrid> terms);
ComplexGrid pairwise_sum(std::span<const ComplexGrid> terms);

}  // namespace bcdi
