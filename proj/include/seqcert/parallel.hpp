#pragma once

#include <cstddef>
#include <functional>

namespace seqcert {

/// Worker count: SEQCERT_THREADS if set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
unsigned worker_count();

/// Runs body(i) for i in [0, count) across worker_count() threads. The
/// first exception thrown by any body is rethrown after all workers stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace seqcert
