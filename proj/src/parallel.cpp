#include "vsheet/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace vsheet {

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void configure_threads_from_env() {
  const char* env = std::getenv("VSHEET_THREADS");
  if (env == nullptr) return;
  const int n = std::atoi(env);
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace vsheet
