#pragma once

#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace roughflow {

// out[i] = f(i) for i < n. Results are stored by index, so any reduction done
// afterwards in index order is independent of the worker count.
template <class T, class F>
std::vector<T> parallel_map(int n, int workers, F&& f) {
  std::vector<T> out(static_cast<size_t>(n));
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::exception_ptr err;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
#endif
  for (int i = 0; i < n; ++i) {
    try {
      out[i] = f(i);
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical(roughflow_err)
#endif
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return out;
}

// serial reference used by tests and the benchmark
template <class T, class F>
std::vector<T> serial_map(int n, F&& f) {
  std::vector<T> out(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) out[i] = f(i);
  return out;
}

}  // namespace roughflow
