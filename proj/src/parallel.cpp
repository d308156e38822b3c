#include "qpnls/parallel.hpp"

#include <omp.h>

#include "qpnls/error.hpp"

namespace qpnls {

void set_threads(int n) {
  if (n < 1) throw ValidationError("thread count must be >= 1");
  omp_set_num_threads(n);
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace qpnls
