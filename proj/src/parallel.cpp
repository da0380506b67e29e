#include "caustica/parallel.hpp"

#include <string>

namespace caustica {

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void configure_threads_from_env() {
#ifdef _OPENMP
  if (const char* s = std::getenv("CAUSTICA_THREADS")) {
    try {
      const int t = std::stoi(s);
      if (t > 0) omp_set_num_threads(t);
    } catch (...) {
      // malformed value: leave the OpenMP default in place
    }
  }
#endif
}

}  // namespace caustica
