#pragma once

#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qnm::par {

inline int hardware_jobs() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// 0 (or negative) means "use all hardware threads".
inline int resolve_jobs(int jobs) { return jobs <= 0 ? hardware_jobs() : jobs; }

/// Serial reference kernel: plain loop over [0, n).
template <class F>
void map_serial(int n, F&& f) {
  for (int i = 0; i < n; ++i) f(i);
}

/// OpenMP kernel over [0, n). Elements must be independent and write only to
/// caller-owned slots; the first exception thrown by an element is rethrown
/// after the loop completes.
template <class F>
void map_openmp(int n, int jobs, F&& f) {
#ifdef _OPENMP
  std::exception_ptr error;
#pragma omp parallel for schedule(static) num_threads(jobs)
  for (int i = 0; i < n; ++i) {
    try {
      f(i);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
#else
  (void)jobs;
  map_serial(n, f);
#endif
}

/// Dispatch between the serial reference and the OpenMP kernel. Both paths
/// perform identical per-element arithmetic, so results do not depend on the
/// job count; reductions belong in the caller, after this returns.
template <class F>
void map_indices(int n, int jobs, F&& f) {
  jobs = resolve_jobs(jobs);
  if (jobs <= 1 || n <= 1) {
    map_serial(n, f);
  } else {
    map_openmp(n, jobs, f);
  }
}

}  // namespace qnm::par
