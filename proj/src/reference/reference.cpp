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

#include "morphokit/reference.hpp"

#include <cmath>

namespace morphokit::reference {

namespace {

// derivative of one component at one node, branchy and obvious
double deriv_at(const ScalarField& f, int i, int j, int k, int axis) {
  const GridSpec& g = f.grid;
  const double inv2h = 1.0 / (2.0 * g.spacing);
  int p, n;
  int di = 0, dj = 0, dk = 0;
  if (axis == 0) {
    p = i;
    n = g.nx;
    di = 1;
  } else if (axis == 1) {
    p = j;
    n = g.ny;
    dj = 1;
  } else {
    p = k;
    n = g.nz;
    dk = 1;
  }
  if (p == 0)
    return (-3.0 * f.at(i, j, k) + 4.0 * f.at(i + di, j + dj, k + dk) -
            f.at(i + 2 * di, j + 2 * dj, k + 2 * dk)) *
           inv2h;
  if (p == n - 1)
    return (3.0 * f.at(i, j, k) - 4.0 * f.at(i - di, j - dj, k - dk) +
            f.at(i - 2 * di, j - 2 * dj, k - 2 * dk)) *
           inv2h;
  return (f.at(i + di, j + dj, k + dk) - f.at(i - di, j - dj, k - dk)) * inv2h;
}

double clamp01(double s, double hi) { return s < 0.0 ? 0.0 : (s > hi ? hi : s); }

double interp(const GridSpec& g, const std::vector<double>& a, double x,
              double y, double z) {
  const double sx = clamp01(x / g.spacing, g.nx - 1.0);
  const double sy = clamp01(y / g.spacing, g.ny - 1.0);
  int i0 = static_cast<int>(sx);
  int j0 = static_cast<int>(sy);
  if (i0 > g.nx - 2) i0 = g.nx - 2;
  if (j0 > g.ny - 2) j0 = g.ny - 2;
  const double fx = sx - i0, fy = sy - j0;
  if (g.dim == 2) {
    const double c00 = a[g.index(i0, j0)], c10 = a[g.index(i0 + 1, j0)];
    const double c01 = a[g.index(i0, j0 + 1)], c11 = a[g.index(i0 + 1, j0 + 1)];
    return c00 * (1 - fx) * (1 - fy) + c10 * fx * (1 - fy) +
           c01 * (1 - fx) * fy + c11 * fx * fy;
  }
  const double sz = clamp01(z / g.spacing, g.nz - 1.0);
  int k0 = static_cast<int>(sz);
  if (k0 > g.nz - 2) k0 = g.nz - 2;
  const double fz = sz - k0;
  double v = 0.0;
  for (int dk = 0; dk <= 1; ++dk)
    for (int dj = 0; dj <= 1; ++dj)
      for (int di = 0; di <= 1; ++di) {
        const double w = (di ? fx : 1 - fx) * (dj ? fy : 1 - fy) *
                         (dk ? fz : 1 - fz);
        v += w * a[g.index(i0 + di, j0 + dj, k0 + dk)];
      }
  return v;
}

}  // namespace

ScalarField jacobian_det(const Transformation& t) {
  const GridSpec& g = t.grid;
  ScalarField out(g);
  const int nz = (g.dim == 3) ? g.nz : 1;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        if (g.dim == 2) {
          const double a = deriv_at(t.comp[0], i, j, k, 0);
          const double b = deriv_at(t.comp[0], i, j, k, 1);
          const double c = deriv_at(t.comp[1], i, j, k, 0);
          const double d = deriv_at(t.comp[1], i, j, k, 1);
          out.at(i, j, k) = a * d - b * c;
        } else {
          double m[3][3];
          for (int r = 0; r < 3; ++r)
            for (int cc = 0; cc < 3; ++cc)
              m[r][cc] = deriv_at(t.comp[r], i, j, k, cc);
          out.at(i, j, k) = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                            m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                            m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        }
      }
  return out;
}

ScalarField curl2d(const Transformation& t) {
  const GridSpec& g = t.grid;
  ScalarField out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out.at(i, j) =
          deriv_at(t.comp[1], i, j, 0, 0) - deriv_at(t.comp[0], i, j, 0, 1);
  return out;
}

VectorField curl3d(const Transformation& t) {
  const GridSpec& g = t.grid;
  VectorField out(g);
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        out.comp[0].at(i, j, k) =
            deriv_at(t.comp[2], i, j, k, 1) - deriv_at(t.comp[1], i, j, k, 2);
        out.comp[1].at(i, j, k) =
            deriv_at(t.comp[0], i, j, k, 2) - deriv_at(t.comp[2], i, j, k, 0);
        out.comp[2].at(i, j, k) =
            deriv_at(t.comp[1], i, j, k, 0) - deriv_at(t.comp[0], i, j, k, 1);
      }
  return out;
}

ScalarField divergence(const VectorField& f) {
  const GridSpec& g = f.grid;
  ScalarField out(g);
  const int nz = (g.dim == 3) ? g.nz : 1;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        double s = 0.0;
        for (int c = 0; c < g.dim; ++c) s += deriv_at(f.comp[c], i, j, k, c);
        out.at(i, j, k) = s;
      }
  return out;
}

Image resample(const Image& img, const Transformation& t) {
  const GridSpec& g = img.grid;
  Image out(g);
  const int nz = (g.dim == 3) ? g.nz : 1;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const std::size_t q = g.index(i, j, k);
        out.v[q] = interp(g, img.v, t.comp[0].v[q], t.comp[1].v[q],
                          g.dim == 3 ? t.comp[2].v[q] : 0.0);
      }
  return out;
}

Transformation compose(const Transformation& a, const Transformation& b) {
  const GridSpec& g = a.grid;
  Transformation out(g);
  const int nz = (g.dim == 3) ? g.nz : 1;
  for (int c = 0; c < g.dim; ++c)
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
          const std::size_t q = g.index(i, j, k);
          out.comp[c].v[q] = interp(g, a.comp[c].v, b.comp[0].v[q],
                                    b.comp[1].v[q],
                                    g.dim == 3 ? b.comp[2].v[q] : 0.0);
        }
  return out;
}

double ssd(const Image& a, const Image& b) {
  double s = 0.0;
  for (std::size_t q = 0; q < a.v.size(); ++q) {
    const double d = a.v[q] - b.v[q];
    s += d * d;
  }
  double w = a.grid.spacing * a.grid.spacing;
  if (a.grid.dim == 3) w *= a.grid.spacing;
  return s * w;
}

}  // namespace morphokit::reference
