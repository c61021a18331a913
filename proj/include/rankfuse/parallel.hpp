// SPDX-License-Identifier: Apache-2.0
#ifndef RANKFUSE_PARALLEL_HPP_
#define RANKFUSE_PARALLEL_HPP_

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rankfuse::parallel {

/// Caps the worker count of every OpenMP kernel. 0 restores the runtime default.
void set_max_threads(int n);

/// Thread count the kernels will use (1 when built without OpenMP).
int max_threads();

inline int thread_index() {
#ifdef _OPENMP
  return omp_get_thread_num();
#else
  return 0;
#endif
}

}  // namespace rankfuse::parallel

#endif  // RANKFUSE_PARALLEL_HPP_
