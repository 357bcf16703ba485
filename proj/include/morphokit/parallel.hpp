/*
 * Copyright 2026 The morphokit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef MORPHOKIT_PARALLEL_HPP
#define MORPHOKIT_PARALLEL_HPP

#include <cstdlib>
#include <vector>

#include "morphokit/grid.hpp"

namespace morphokit {

/// Caps the OpenMP thread count for subsequent kernels. k <= 0 keeps the
/// current setting.
void set_thread_cap(int k);

/// Current OpenMP thread cap.
int thread_cap();

/// Reads MORPHOKIT_THREADS; returns 0 when unset or unparsable.
int thread_cap_from_env();

/// Sum of term(i, j, k) over every node, accumulated per x-line and combined
/// in a fixed line order. The result is bitwise independent of the thread
/// count: each x-line is summed sequentially by one thread, and line partials
/// are added in (k, j) order on one thread afterwards.
template <typename Term>
double deterministic_sum(const GridSpec& g, Term&& term) {
  const int ny = g.ny;
  const int nz = (g.dim == 3) ? g.nz : 1;
  const int nlines = ny * nz;
  std::vector<double> partial(static_cast<std::size_t>(nlines));
#pragma omp parallel for schedule(static)
  for (int line = 0; line < nlines; ++line) {
    const int j = line % ny;
    const int k = line / ny;
    double s = 0.0;
    for (int i = 0; i < g.nx; ++i) s += term(i, j, k);
    partial[static_cast<std::size_t>(line)] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace morphokit

#endif
