#ifndef FLUCTLAB_PARALLEL_HPP
#define FLUCTLAB_PARALLEL_HPP

#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fl {

// Execution policy shared by every ensemble and grid kernel in the library.
// Results must not depend on it: parallel bodies write to disjoint slots and
// reductions are serial folds over those slots, so `serial` and `openmp`
// produce bitwise-identical output. The serial path is the reference the
// tests compare against; the benchmark tool times one against the other.
enum class Exec { serial, openmp };

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// for_each_index(n, body): body(i) for i in [0, n)
template <class Body>
void for_each_index(Exec exec, std::size_t n, const Body &body) {
  if (exec == Exec::openmp) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
      body(static_cast<std::size_t>(i));
    return;
#endif
  }
  for (std::size_t i = 0; i < n; ++i) body(i);
}

// Runs `paths` independent jobs, each filling its own result slot, then folds
// the slots in index order.
template <class Result, class Job>
std::vector<Result> run_ensemble(Exec exec, std::size_t paths, const Job &job) {
  std::vector<Result> out(paths);
  for_each_index(exec, paths, [&](std::size_t p) { out[p] = job(p); });
  return out;
}

}  // namespace fl

#endif
