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

#include "morphokit/field_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "morphokit/parallel.hpp"

namespace morphokit {

namespace {

// Snap window for node-exact sampling: a coordinate that is within this of a
// whole lattice step is treated as sitting on the node. Far below any
// meaningful displacement, far above the rounding in x/h.
constexpr double kNodeSnap = 1e-9;

void check_components(const Transformation& t, const char* where) {
  t.grid.validate();
  if (static_cast<int>(t.comp.size()) != t.grid.dim)
    throw dimension_error(std::string(where) + ": map must have dim components");
  for (const auto& c : t.comp) require_same_grid(c.grid, t.grid, where);
}

}  // namespace

ScalarField derivative(const ScalarField& f, int axis) {
  const GridSpec& g = f.grid;
  g.validate();
  if (axis < 0 || axis >= g.dim)
    throw dimension_error("derivative: axis " + std::to_string(axis) +
                          " out of range for dim " + std::to_string(g.dim));
  const int n = g.extent(axis);
  const std::size_t sx = 1;
  const std::size_t sy = static_cast<std::size_t>(g.nx);
  const std::size_t sz = static_cast<std::size_t>(g.nx) * g.ny;
  const std::size_t s = (axis == 0) ? sx : (axis == 1) ? sy : sz;
  const double inv2h = 1.0 / (2.0 * g.spacing);
  const int nz = (g.dim == 3) ? g.nz : 1;
  ScalarField out(g);
  const double* a = f.v.data();
  double* o = out.v.data();
#pragma omp parallel for collapse(2) schedule(static)
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const std::size_t q = g.index(i, j, k);
        const int p = (axis == 0) ? i : (axis == 1) ? j : k;
        double d;
        if (p == 0)
          d = -3.0 * a[q] + 4.0 * a[q + s] - a[q + 2 * s];
        else if (p == n - 1)
          d = 3.0 * a[q] - 4.0 * a[q - s] + a[q - 2 * s];
        else
          d = a[q + s] - a[q - s];
        o[q] = d * inv2h;
      }
  return out;
}

ScalarField jacobian_det(const Transformation& t) {
  check_components(t, "jacobian_det");
  const GridSpec& g = t.grid;
  ScalarField out(g);
  if (g.dim == 2) {
    const ScalarField dxdx = derivative(t.comp[0], 0);
    const ScalarField dxdy = derivative(t.comp[0], 1);
    const ScalarField dydx = derivative(t.comp[1], 0);
    const ScalarField dydy = derivative(t.comp[1], 1);
    const std::size_t n = g.node_count();
#pragma omp parallel for schedule(static)
    for (long long q = 0; q < static_cast<long long>(n); ++q)
      out.v[q] = dxdx.v[q] * dydy.v[q] - dxdy.v[q] * dydx.v[q];
  } else {
    ScalarField d[3][3];
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) d[r][c] = derivative(t.comp[r], c);
    const std::size_t n = g.node_count();
#pragma omp parallel for schedule(static)
    for (long long q = 0; q < static_cast<long long>(n); ++q) {
      const double a00 = d[0][0].v[q], a01 = d[0][1].v[q], a02 = d[0][2].v[q];
      const double a10 = d[1][0].v[q], a11 = d[1][1].v[q], a12 = d[1][2].v[q];
      const double a20 = d[2][0].v[q], a21 = d[2][1].v[q], a22 = d[2][2].v[q];
      out.v[q] = a00 * (a11 * a22 - a12 * a21) - a01 * (a10 * a22 - a12 * a20) +
                 a02 * (a10 * a21 - a11 * a20);
    }
  }
  return out;
}

ScalarField curl2d(const Transformation& t) {
  check_components(t, "curl2d");
  if (t.grid.dim != 2) throw dimension_error("curl2d: expected a 2D map");
  const ScalarField d2dx = derivative(t.comp[1], 0);
  const ScalarField d1dy = derivative(t.comp[0], 1);
  ScalarField out(t.grid);
  const std::size_t n = t.grid.node_count();
#pragma omp parallel for schedule(static)
  for (long long q = 0; q < static_cast<long long>(n); ++q)
    out.v[q] = d2dx.v[q] - d1dy.v[q];
  return out;
}

VectorField curl3d(const Transformation& t) {
  check_components(t, "curl3d");
  if (t.grid.dim != 3) throw dimension_error("curl3d: expected a 3D map");
  const ScalarField d3dy = derivative(t.comp[2], 1);
  const ScalarField d2dz = derivative(t.comp[1], 2);
  const ScalarField d1dz = derivative(t.comp[0], 2);
  const ScalarField d3dx = derivative(t.comp[2], 0);
  const ScalarField d2dx = derivative(t.comp[1], 0);
  const ScalarField d1dy = derivative(t.comp[0], 1);
  VectorField out(t.grid);
  const std::size_t n = t.grid.node_count();
#pragma omp parallel for schedule(static)
  for (long long q = 0; q < static_cast<long long>(n); ++q) {
    out.comp[0].v[q] = d3dy.v[q] - d2dz.v[q];
    out.comp[1].v[q] = d1dz.v[q] - d3dx.v[q];
    out.comp[2].v[q] = d2dx.v[q] - d1dy.v[q];
  }
  return out;
}

ScalarField divergence(const VectorField& f) {
  f.grid.validate();
  if (static_cast<int>(f.comp.size()) != f.grid.dim)
    throw dimension_error("divergence: field must have dim components");
  ScalarField out(f.grid);
  for (int c = 0; c < f.grid.dim; ++c) {
    const ScalarField d = derivative(f.comp[c], c);
    const std::size_t n = f.grid.node_count();
#pragma omp parallel for schedule(static)
    for (long long q = 0; q < static_cast<long long>(n); ++q) out.v[q] += d.v[q];
  }
  return out;
}

ScalarField laplacian_interior(const ScalarField& f) {
  const GridSpec& g = f.grid;
  g.validate();
  ScalarField out(g);
  const double invh2 = 1.0 / (g.spacing * g.spacing);
  const std::size_t sy = static_cast<std::size_t>(g.nx);
  const std::size_t sz = static_cast<std::size_t>(g.nx) * g.ny;
  const double* a = f.v.data();
  if (g.dim == 2) {
#pragma omp parallel for schedule(static)
    for (int j = 1; j < g.ny - 1; ++j)
      for (int i = 1; i < g.nx - 1; ++i) {
        const std::size_t q = g.index(i, j);
        out.v[q] = (a[q - 1] + a[q + 1] + a[q - sy] + a[q + sy] - 4.0 * a[q]) * invh2;
      }
  } else {
#pragma omp parallel for collapse(2) schedule(static)
    for (int k = 1; k < g.nz - 1; ++k)
      for (int j = 1; j < g.ny - 1; ++j)
        for (int i = 1; i < g.nx - 1; ++i) {
          const std::size_t q = g.index(i, j, k);
          out.v[q] = (a[q - 1] + a[q + 1] + a[q - sy] + a[q + sy] + a[q - sz] +
                      a[q + sz] - 6.0 * a[q]) *
                     invh2;
        }
  }
  return out;
}

namespace {

struct AxisSample {
  int i0 = 0;     // lower cell index
  double f = 0.0; // fraction in [0,1]
  bool clamped = false;
};

AxisSample axis_locate(double x, double h, int n) {
  AxisSample r;
  double s = x / h;
  const double snapped = std::nearbyint(s);
  if (std::fabs(s - snapped) < kNodeSnap) s = snapped;
  if (s <= 0.0) {
    r.clamped = (s < 0.0);
    r.i0 = 0;
    r.f = 0.0;
    return r;
  }
  if (s >= static_cast<double>(n - 1)) {
    r.clamped = (s > static_cast<double>(n - 1));
    r.i0 = n - 2;
    r.f = 1.0;
    return r;
  }
  r.i0 = static_cast<int>(s);
  if (r.i0 > n - 2) r.i0 = n - 2;
  r.f = s - static_cast<double>(r.i0);
  return r;
}

double sample_core(const GridSpec& g, const double* a, double x, double y,
                   double z) {
  const AxisSample ax = axis_locate(x, g.spacing, g.nx);
  const AxisSample ay = axis_locate(y, g.spacing, g.ny);
  if (g.dim == 2) {
    const std::size_t q = g.index(ax.i0, ay.i0);
    const std::size_t sy = static_cast<std::size_t>(g.nx);
    const double c00 = a[q], c10 = a[q + 1];
    const double c01 = a[q + sy], c11 = a[q + sy + 1];
    const double fx = ax.f, fy = ay.f;
    return (1.0 - fy) * ((1.0 - fx) * c00 + fx * c10) +
           fy * ((1.0 - fx) * c01 + fx * c11);
  }
  const AxisSample az = axis_locate(z, g.spacing, g.nz);
  const std::size_t sy = static_cast<std::size_t>(g.nx);
  const std::size_t sz = static_cast<std::size_t>(g.nx) * g.ny;
  const std::size_t q = g.index(ax.i0, ay.i0, az.i0);
  const double fx = ax.f, fy = ay.f, fz = az.f;
  const double c000 = a[q], c100 = a[q + 1];
  const double c010 = a[q + sy], c110 = a[q + sy + 1];
  const double c001 = a[q + sz], c101 = a[q + sz + 1];
  const double c011 = a[q + sy + sz], c111 = a[q + sy + sz + 1];
  const double lo = (1.0 - fy) * ((1.0 - fx) * c000 + fx * c100) +
                    fy * ((1.0 - fx) * c010 + fx * c110);
  const double hi = (1.0 - fy) * ((1.0 - fx) * c001 + fx * c101) +
                    fy * ((1.0 - fx) * c011 + fx * c111);
  return (1.0 - fz) * lo + fz * hi;
}

}  // namespace

double sample_field(const ScalarField& f, double x, double y, double z) {
  return sample_core(f.grid, f.v.data(), x, y, z);
}

double sample_image(const Image& f, double x, double y, double z) {
  return sample_core(f.grid, f.v.data(), x, y, z);
}

void sample_image_with_gradient(const Image& f, double x, double y, double z,
                                double* value, double* grad) {
  const GridSpec& g = f.grid;
  const double* a = f.v.data();
  const double invh = 1.0 / g.spacing;
  const AxisSample ax = axis_locate(x, g.spacing, g.nx);
  const AxisSample ay = axis_locate(y, g.spacing, g.ny);
  if (g.dim == 2) {
    const std::size_t q = g.index(ax.i0, ay.i0);
    const std::size_t sy = static_cast<std::size_t>(g.nx);
    const double c00 = a[q], c10 = a[q + 1];
    const double c01 = a[q + sy], c11 = a[q + sy + 1];
    const double fx = ax.f, fy = ay.f;
    *value = (1.0 - fy) * ((1.0 - fx) * c00 + fx * c10) +
             fy * ((1.0 - fx) * c01 + fx * c11);
    grad[0] = ax.clamped ? 0.0
                         : ((c10 - c00) * (1.0 - fy) + (c11 - c01) * fy) * invh;
    grad[1] = ay.clamped ? 0.0
                         : ((c01 - c00) * (1.0 - fx) + (c11 - c10) * fx) * invh;
    return;
  }
  const AxisSample az = axis_locate(z, g.spacing, g.nz);
  const std::size_t sy = static_cast<std::size_t>(g.nx);
  const std::size_t sz = static_cast<std::size_t>(g.nx) * g.ny;
  const std::size_t q = g.index(ax.i0, ay.i0, az.i0);
  const double fx = ax.f, fy = ay.f, fz = az.f;
  const double c000 = a[q], c100 = a[q + 1];
  const double c010 = a[q + sy], c110 = a[q + sy + 1];
  const double c001 = a[q + sz], c101 = a[q + sz + 1];
  const double c011 = a[q + sy + sz], c111 = a[q + sy + sz + 1];
  const double lo = (1.0 - fy) * ((1.0 - fx) * c000 + fx * c100) +
                    fy * ((1.0 - fx) * c010 + fx * c110);
  const double hi = (1.0 - fy) * ((1.0 - fx) * c001 + fx * c101) +
                    fy * ((1.0 - fx) * c011 + fx * c111);
  *value = (1.0 - fz) * lo + fz * hi;
  grad[0] = ax.clamped
                ? 0.0
                : (((c100 - c000) * (1.0 - fy) + (c110 - c010) * fy) * (1.0 - fz) +
                   ((c101 - c001) * (1.0 - fy) + (c111 - c011) * fy) * fz) *
                      invh;
  grad[1] = ay.clamped
                ? 0.0
                : (((c010 - c000) * (1.0 - fx) + (c110 - c100) * fx) * (1.0 - fz) +
                   ((c011 - c001) * (1.0 - fx) + (c111 - c101) * fx) * fz) *
                      invh;
  grad[2] = az.clamped ? 0.0 : (hi - lo) * invh;
}

Image resample(const Image& img, const Transformation& t) {
  check_components(t, "resample");
  require_same_grid(img.grid, t.grid, "resample");
  const GridSpec& g = img.grid;
  Image out(g);
  const std::size_t n = g.node_count();
  const double* t1 = t.comp[0].v.data();
  const double* t2 = t.comp[1].v.data();
  const double* t3 = (g.dim == 3) ? t.comp[2].v.data() : nullptr;
#pragma omp parallel for schedule(static)
  for (long long q = 0; q < static_cast<long long>(n); ++q)
    out.v[q] = sample_core(g, img.v.data(), t1[q], t2[q], t3 ? t3[q] : 0.0);
  return out;
}

Transformation compose(const Transformation& a, const Transformation& b) {
  check_components(a, "compose");
  check_components(b, "compose");
  require_same_grid(a.grid, b.grid, "compose");
  const GridSpec& g = a.grid;
  Transformation out(g);
  const std::size_t n = g.node_count();
  const double* b1 = b.comp[0].v.data();
  const double* b2 = b.comp[1].v.data();
  const double* b3 = (g.dim == 3) ? b.comp[2].v.data() : nullptr;
  for (int c = 0; c < g.dim; ++c) {
    const double* ac = a.comp[c].v.data();
    double* oc = out.comp[c].v.data();
#pragma omp parallel for schedule(static)
    for (long long q = 0; q < static_cast<long long>(n); ++q)
      oc[q] = sample_core(g, ac, b1[q], b2[q], b3 ? b3[q] : 0.0);
  }
  return out;
}

Transformation invert_transformation(const Transformation& t, int max_iters,
                                     double tol) {
  check_components(t, "invert_transformation");
  const GridSpec& g = t.grid;
  Transformation out(g);
  const std::size_t n = g.node_count();
  const double* t1 = t.comp[0].v.data();
  const double* t2 = t.comp[1].v.data();
  const double* t3 = (g.dim == 3) ? t.comp[2].v.data() : nullptr;
  const int nx = g.nx, ny = g.ny;
#pragma omp parallel for schedule(static)
  for (long long q = 0; q < static_cast<long long>(n); ++q) {
    const int i = static_cast<int>(q % nx);
    const int j = static_cast<int>((q / nx) % ny);
    const int k = static_cast<int>(q / (static_cast<long long>(nx) * ny));
    const double yx = g.coord(i), yy = g.coord(j), yz = g.coord(k);
    double x = yx, y = yy, z = yz;
    for (int it = 0; it < max_iters; ++it) {
      const double rx = sample_core(g, t1, x, y, z) - yx;
      const double ry = sample_core(g, t2, x, y, z) - yy;
      const double rz = t3 ? sample_core(g, t3, x, y, z) - yz : 0.0;
      x -= rx;
      y -= ry;
      z -= rz;
      if (std::max({std::fabs(rx), std::fabs(ry), std::fabs(rz)}) < tol) break;
    }
    out.comp[0].v[q] = x;
    out.comp[1].v[q] = y;
    if (t3) out.comp[2].v[q] = z;
  }
  return out;
}

double ssd(const Image& a, const Image& b) {
  require_same_grid(a.grid, b.grid, "ssd");
  const GridSpec& g = a.grid;
  const double* pa = a.v.data();
  const double* pb = b.v.data();
  const double sum = deterministic_sum(g, [&](int i, int j, int k) {
    const std::size_t q = g.index(i, j, k);
    const double d = pa[q] - pb[q];
    return d * d;
  });
  double w = g.spacing * g.spacing;
  if (g.dim == 3) w *= g.spacing;
  return sum * w;
}

double min_interior_jacobian(const Transformation& t) {
  const ScalarField j = jacobian_det(t);
  const GridSpec& g = t.grid;
  const int nz = (g.dim == 3) ? g.nz : 1;
  const int k0 = (g.dim == 3) ? 1 : 0;
  const int k1 = (g.dim == 3) ? nz - 1 : 1;
  double m = std::numeric_limits<double>::infinity();
#pragma omp parallel for collapse(2) reduction(min : m) schedule(static)
  for (int k = k0; k < k1; ++k)
    for (int jj = 1; jj < g.ny - 1; ++jj)
      for (int i = 1; i < g.nx - 1; ++i) {
        const double v = j.v[g.index(i, jj, k)];
        if (v < m) m = v;
      }
  return m;
}

double field_mean(const ScalarField& f) {
  const GridSpec& g = f.grid;
  const double* a = f.v.data();
  const double sum = deterministic_sum(
      g, [&](int i, int j, int k) { return a[g.index(i, j, k)]; });
  return sum / static_cast<double>(g.node_count());
}

Image quantize(const Image& img, int levels) {
  if (levels < 2) throw spec_out_of_range("quantize: need at least 2 levels");
  const double steps = static_cast<double>(levels - 1);
  Image out = img;
#pragma omp parallel for schedule(static)
  for (long long q = 0; q < static_cast<long long>(out.v.size()); ++q) {
    const double v = std::clamp(out.v[q], 0.0, 1.0);
    out.v[q] = std::round(v * steps) / steps;
  }
  return out;
}

namespace {

// Uniform in [-1, 1), portable across standard libraries.
double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
}

ScalarField smooth_interior(const ScalarField& f, int passes) {
  const GridSpec& g = f.grid;
  ScalarField cur = f;
  const std::size_t sy = static_cast<std::size_t>(g.nx);
  const std::size_t sz = static_cast<std::size_t>(g.nx) * g.ny;
  const int nz = (g.dim == 3) ? g.nz : 1;
  const int k0 = (g.dim == 3) ? 1 : 0;
  const int k1 = (g.dim == 3) ? nz - 1 : 1;
  for (int pass = 0; pass < passes; ++pass) {
    ScalarField next(g);
    const double* a = cur.v.data();
#pragma omp parallel for collapse(2) schedule(static)
    for (int k = k0; k < k1; ++k)
      for (int j = 1; j < g.ny - 1; ++j)
        for (int i = 1; i < g.nx - 1; ++i) {
          const std::size_t q = g.index(i, j, k);
          double s = a[q] + a[q - 1] + a[q + 1] + a[q - sy] + a[q + sy];
          double w = 5.0;
          if (g.dim == 3) {
            s += a[q - sz] + a[q + sz];
            w = 7.0;
          }
          next.v[q] = s / w;
        }
    cur = std::move(next);
  }
  return cur;
}

}  // namespace

Transformation add_noise(const Transformation& t, double amplitude,
                         std::uint64_t seed) {
  check_components(t, "add_noise");
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude))
    throw spec_out_of_range("add_noise: amplitude must be finite and >= 0");
  const GridSpec& g = t.grid;
  std::mt19937_64 rng(seed);
  Transformation out = t;
  const int nz = (g.dim == 3) ? g.nz : 1;
  const int k0 = (g.dim == 3) ? 1 : 0;
  const int k1 = (g.dim == 3) ? nz - 1 : 1;
  for (int c = 0; c < g.dim; ++c) {
    ScalarField raw(g);
    // sequential draw in fixed node order, independent of thread count
    for (int k = k0; k < k1; ++k)
      for (int j = 1; j < g.ny - 1; ++j)
        for (int i = 1; i < g.nx - 1; ++i)
          raw.at(i, j, k) = amplitude * unit_draw(rng);
    const ScalarField smooth = smooth_interior(raw, 2);
    double* oc = out.comp[c].v.data();
    const std::size_t n = g.node_count();
#pragma omp parallel for schedule(static)
    for (long long q = 0; q < static_cast<long long>(n); ++q)
      oc[q] += smooth.v[q];
  }
  out.diffeomorphic = min_interior_jacobian(out) > 0.0;
  return out;
}

}  // namespace morphokit
