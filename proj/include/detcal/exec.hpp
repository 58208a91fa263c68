#pragma once

#include <cstddef>
#include <exception>
#include <vector>

namespace detcal {

/// Execution policy for the data-parallel kernels. `Serial` is the reference
/// path; `Parallel` distributes independent work items over OpenMP threads and
/// must produce bit-identical results.
enum class Exec { Serial, Parallel };

/// Runs fn(i) for i in [0, n). Work items must be independent. If any item
/// throws, the exception of the lowest failing index is rethrown after all
/// items have finished, so error reporting does not depend on scheduling.
template <typename Fn>
void parallel_for(Exec exec, std::size_t n, Fn&& fn) {
  if (exec == Exec::Serial || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace detcal
