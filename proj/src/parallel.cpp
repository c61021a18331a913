// SPDX-License-Identifier: Apache-2.0
#include "rankfuse/parallel.hpp"

#include <atomic>

namespace rankfuse::parallel {

namespace {
std::atomic<int> g_max_threads{0};
}

void set_max_threads(int n) { g_max_threads.store(n < 0 ? 0 : n); }

int max_threads() {
  int n = g_max_threads.load();
#ifdef _OPENMP
  return n > 0 ? n : omp_get_max_threads();
#else
  (void)n;
  return 1;
#endif
}

}  // namespace rankfuse::parallel
