#include "yflow/parallel.hpp"

#include <omp.h>

#include "yflow/errors.hpp"

namespace yflow {

void set_num_threads(int threads) {
  if (threads < 1) throw InvalidArgument("thread count must be at least 1");
  omp_set_num_threads(threads);
}

int num_threads() { return omp_get_max_threads(); }

}  // namespace yflow
