#pragma once

#include <exception>
#include <mutex>

namespace nilnf {

// Kernels that have an OpenMP version take an Exec tag; Serial is the
// reference path used by tests and benchmarks for comparison.
enum class Exec { Serial, Parallel };

// Thread count for parallel kernels: NILNF_THREADS if set and positive,
// otherwise the OpenMP default (1 without OpenMP).
int configured_threads();
void set_default_exec(Exec e);
Exec default_exec();

// body(i) for 0 <= i < n. The parallel path runs below `min_parallel`
// iterations serially; the first exception thrown by any iteration is
// rethrown after the loop.
template <class F>
void parallel_for(long n, Exec exec, F&& body, long min_parallel = 2) {
  if (exec != Exec::Parallel || n < min_parallel) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  std::mutex mu;
  int threads = configured_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard lock(mu);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace nilnf
