#include "thresholdlab/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>

namespace thresholdlab {

int worker_count() {
  int available = omp_get_max_threads();
  const char* env = std::getenv("THRESHOLDLAB_THREADS");
  if (env == nullptr || *env == '\0') return available;
  char* end = nullptr;
  long cap = std::strtol(env, &end, 10);
  if (end == env || cap <= 0) return available;
  return static_cast<int>(std::min<long>(cap, 1024));
}

}  // namespace thresholdlab
