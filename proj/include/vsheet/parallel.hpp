#pragma once

// Execution policy for the data-parallel kernels. Every kernel that has an
// OpenMP loop keeps a serial reference path selected by Exec::Serial; the
// test suite checks that both paths agree bit-for-bit or to rounding.

namespace vsheet {

enum class Exec { Serial, Parallel };

int max_threads();

// Applies VSHEET_THREADS (if set) to the OpenMP runtime. Called by the CLI.
void configure_threads_from_env();

}  // namespace vsheet

namespace vsheet {

// Runs fn(i) for i in [0, n). The serial branch is the reference path.
template <class Fn>
void parallel_for(int n, Exec exec, Fn&& fn) {
  if (exec == Exec::Serial) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) fn(i);
}

}  // namespace vsheet
