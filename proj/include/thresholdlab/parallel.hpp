#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <vector>

namespace thresholdlab {

/// Worker count for OpenMP regions. Honors THRESHOLDLAB_THREADS (0 or unset
/// means the OpenMP default); a positive value fixes the count, even above
/// the core count.
int worker_count();

/// Runs body(i) for i in [0, count) across workers. Exceptions are caught
/// per row; the one with the lowest index is rethrown on the caller.
template <class Body>
void parallel_rows(std::size_t count, Body body) {
  std::vector<std::exception_ptr> errors(count);
  const auto total = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
  for (std::int64_t i = 0; i < total; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace thresholdlab
