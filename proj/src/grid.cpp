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

#include "morphokit/grid.hpp"

#include <cmath>
#include <sstream>

namespace morphokit {

void GridSpec::validate() const {
  if (dim != 2 && dim != 3)
    throw spec_out_of_range("grid dim must be 2 or 3, got " + std::to_string(dim));
  if (nx < 3 || ny < 3 || (dim == 3 && nz < 3)) {
    std::ostringstream os;
    os << "grid extents must be >= 3 per axis, got " << nx << "x" << ny;
    if (dim == 3) os << "x" << nz;
    throw spec_out_of_range(os.str());
  }
  if (!(spacing > 0.0) || !std::isfinite(spacing))
    throw spec_out_of_range("grid spacing must be positive and finite");
}

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* where) {
  if (a != b) {
    std::ostringstream os;
    os << where << ": grids differ (" << a.nx << "x" << a.ny;
    if (a.dim == 3) os << "x" << a.nz;
    os << " h=" << a.spacing << " vs " << b.nx << "x" << b.ny;
    if (b.dim == 3) os << "x" << b.nz;
    os << " h=" << b.spacing << ")";
    throw grid_mismatch(os.str());
  }
}

Transformation identity_transform(const GridSpec& g) {
  g.validate();
  Transformation t(g);
  const int nz = (g.dim == 3) ? g.nz : 1;
#pragma omp parallel for collapse(2) schedule(static)
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const std::size_t q = g.index(i, j, k);
        t.comp[0].v[q] = g.coord(i);
        t.comp[1].v[q] = g.coord(j);
        if (g.dim == 3) t.comp[2].v[q] = g.coord(k);
      }
  t.diffeomorphic = true;
  return t;
}

namespace {

double node_dist2(const Transformation& a, const Transformation& b,
                  std::size_t q) {
  double s = 0.0;
  for (int c = 0; c < a.grid.dim; ++c) {
    const double d = a.comp[c].v[q] - b.comp[c].v[q];
    s += d * d;
  }
  return s;
}

}  // namespace

double boundary_displacement(const Transformation& t) {
  const GridSpec& g = t.grid;
  const int nz = (g.dim == 3) ? g.nz : 1;
  double m2 = 0.0;
#pragma omp parallel for collapse(2) reduction(max : m2) schedule(static)
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        if (!g.on_boundary(i, j, k)) continue;
        const std::size_t q = g.index(i, j, k);
        double s = 0.0;
        double d = t.comp[0].v[q] - g.coord(i);
        s += d * d;
        d = t.comp[1].v[q] - g.coord(j);
        s += d * d;
        if (g.dim == 3) {
          d = t.comp[2].v[q] - g.coord(k);
          s += d * d;
        }
        if (s > m2) m2 = s;
      }
  return std::sqrt(m2);
}

double max_displacement(const Transformation& t) {
  const GridSpec& g = t.grid;
  const int nz = (g.dim == 3) ? g.nz : 1;
  double m2 = 0.0;
#pragma omp parallel for collapse(2) reduction(max : m2) schedule(static)
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const std::size_t q = g.index(i, j, k);
        double s = 0.0;
        double d = t.comp[0].v[q] - g.coord(i);
        s += d * d;
        d = t.comp[1].v[q] - g.coord(j);
        s += d * d;
        if (g.dim == 3) {
          d = t.comp[2].v[q] - g.coord(k);
          s += d * d;
        }
        if (s > m2) m2 = s;
      }
  return std::sqrt(m2);
}

double max_node_distance(const Transformation& a, const Transformation& b) {
  require_same_grid(a.grid, b.grid, "max_node_distance");
  const std::size_t n = a.grid.node_count();
  double m2 = 0.0;
#pragma omp parallel for reduction(max : m2) schedule(static)
  for (long long q = 0; q < static_cast<long long>(n); ++q) {
    const double s = node_dist2(a, b, static_cast<std::size_t>(q));
    if (s > m2) m2 = s;
  }
  return std::sqrt(m2);
}

}  // namespace morphokit
