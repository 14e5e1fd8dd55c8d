#include "net2rdm/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace net2rdm {

int default_workers() noexcept {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

int resolve_workers(int requested) noexcept {
  return requested > 0 ? requested : default_workers();
}

void set_process_workers(int workers) noexcept {
#ifdef _OPENMP
  if (workers > 0) omp_set_num_threads(workers);
#else
  (void)workers;
#endif
}

}  // namespace net2rdm
