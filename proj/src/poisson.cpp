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

#include "morphokit/poisson.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <vector>


namespace morphokit {

namespace {

// FFTW planning is not thread-safe; executing plans is. One mutex guards all
// plan creation/destruction. Plans are cached per thread and interior shape,
// FFTW_ESTIMATE keeps plan choice (and thus bit patterns) reproducible.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct DstPlan {
  fftw_plan plan = nullptr;
  double* buf = nullptr;
  std::size_t len = 0;

  ~DstPlan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (plan) fftw_destroy_plan(plan);
    if (buf) fftw_free(buf);
  }
};

DstPlan& dst_plan_for(int mx, int my, int mz) {
  thread_local std::map<std::array<int, 3>, std::unique_ptr<DstPlan>> cache;
  const std::array<int, 3> key{mx, my, mz};
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;
  auto p = std::make_unique<DstPlan>();
  p->len = static_cast<std::size_t>(mx) * my * (mz > 0 ? mz : 1);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    p->buf = fftw_alloc_real(p->len);
    if (mz > 0)
      p->plan = fftw_plan_r2r_3d(mz, my, mx, p->buf, p->buf, FFTW_RODFT00,
                                 FFTW_RODFT00, FFTW_RODFT00, FFTW_ESTIMATE);
    else
      p->plan = fftw_plan_r2r_2d(my, mx, p->buf, p->buf, FFTW_RODFT00,
                                 FFTW_RODFT00, FFTW_ESTIMATE);
  }
  if (!p->plan) throw error("poisson: FFTW plan creation failed");
  DstPlan& ref = *p;
  cache.emplace(key, std::move(p));
  return ref;
}

// Interior right-hand side of the lattice system
//   sum(neighbors) - 2*dim*w = h^2 F - (known boundary neighbors).
std::vector<double> folded_rhs(const ScalarField& rhs, const ScalarField& bd) {
  const GridSpec& g = rhs.grid;
  const double h2 = g.spacing * g.spacing;
  const int mx = g.nx - 2, my = g.ny - 2;
  const int mz = (g.dim == 3) ? g.nz - 2 : 1;
  std::vector<double> b(static_cast<std::size_t>(mx) * my * mz);
#pragma omp parallel for collapse(2) schedule(static)
  for (int kk = 0; kk < mz; ++kk)
    for (int jj = 0; jj < my; ++jj)
      for (int ii = 0; ii < mx; ++ii) {
        const int i = ii + 1, j = jj + 1;
        const int k = (g.dim == 3) ? kk + 1 : 0;
        double v = h2 * rhs.at(i, j, k);
        if (ii == 0) v -= bd.at(0, j, k);
        if (ii == mx - 1) v -= bd.at(g.nx - 1, j, k);
        if (jj == 0) v -= bd.at(i, 0, k);
        if (jj == my - 1) v -= bd.at(i, g.ny - 1, k);
        if (g.dim == 3) {
          if (kk == 0) v -= bd.at(i, j, 0);
          if (kk == mz - 1) v -= bd.at(i, j, g.nz - 1);
        }
        b[(static_cast<std::size_t>(kk) * my + jj) * mx + ii] = v;
      }
  return b;
}

ScalarField assemble(const GridSpec& g, const ScalarField& bd,
                     const std::vector<double>& interior) {
  const int mx = g.nx - 2, my = g.ny - 2;
  const int nz = (g.dim == 3) ? g.nz : 1;
  ScalarField out(g);
#pragma omp parallel for collapse(2) schedule(static)
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const std::size_t q = g.index(i, j, k);
        if (g.on_boundary(i, j, k)) {
          out.v[q] = bd.v[q];
        } else {
          const std::size_t p =
              (static_cast<std::size_t>((g.dim == 3) ? k - 1 : 0) * my +
               (j - 1)) *
                  mx +
              (i - 1);
          out.v[q] = interior[p];
        }
      }
  return out;
}

ScalarField solve_spectral(const ScalarField& rhs, const ScalarField& bd) {
  const GridSpec& g = rhs.grid;
  const int mx = g.nx - 2, my = g.ny - 2;
  const int mz = (g.dim == 3) ? g.nz - 2 : 0;
  std::vector<double> b = folded_rhs(rhs, bd);
  DstPlan& p = dst_plan_for(mx, my, mz);
  std::copy(b.begin(), b.end(), p.buf);
  fftw_execute(p.plan);

  // One lattice-Laplacian eigenvalue per sine mode and axis.
  std::vector<double> lx(static_cast<std::size_t>(mx)), ly(my), lz(mz > 0 ? mz : 0);
  for (int m = 0; m < mx; ++m)
    lx[m] = 2.0 * std::cos(M_PI * (m + 1) / (mx + 1)) - 2.0;
  for (int m = 0; m < my; ++m)
    ly[m] = 2.0 * std::cos(M_PI * (m + 1) / (my + 1)) - 2.0;
  for (int m = 0; m < mz; ++m)
    lz[m] = 2.0 * std::cos(M_PI * (m + 1) / (mz + 1)) - 2.0;

  const int kz = mz > 0 ? mz : 1;
  double scale = 1.0 / (4.0 * (mx + 1) * (my + 1));
  if (mz > 0) scale /= 2.0 * (mz + 1);
#pragma omp parallel for collapse(2) schedule(static)
  for (int kk = 0; kk < kz; ++kk)
    for (int jj = 0; jj < my; ++jj)
      for (int ii = 0; ii < mx; ++ii) {
        const std::size_t q = (static_cast<std::size_t>(kk) * my + jj) * mx + ii;
        double lam = lx[ii] + ly[jj];
        if (mz > 0) lam += lz[kk];
        p.buf[q] = p.buf[q] / lam * scale;
      }
  fftw_execute(p.plan);
  std::vector<double> w(p.buf, p.buf + p.len);
  return assemble(g, bd, w);
}

ScalarField solve_sor(const ScalarField& rhs, const ScalarField& bd,
                      const PoissonOptions& opts) {
  const GridSpec& g = rhs.grid;
  const double h2 = g.spacing * g.spacing;
  const int mx = g.nx - 2, my = g.ny - 2;
  const int mz = (g.dim == 3) ? g.nz - 2 : 1;
  const int twod = 2 * g.dim;
  const int nmax = std::max(mx, std::max(my, (g.dim == 3) ? mz : 0));
  const double omega = 2.0 / (1.0 + std::sin(M_PI / (nmax + 1)));

  // start from boundary data with zero interior
  ScalarField w(g);
  const int nz = (g.dim == 3) ? g.nz : 1;
#pragma omp parallel for collapse(2) schedule(static)
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        if (g.on_boundary(i, j, k)) w.v[g.index(i, j, k)] = bd.v[g.index(i, j, k)];

  const std::size_t sy = static_cast<std::size_t>(g.nx);
  const std::size_t sz = static_cast<std::size_t>(g.nx) * g.ny;
  const int k0 = (g.dim == 3) ? 1 : 0;
  const int k1 = (g.dim == 3) ? g.nz - 1 : 1;

  // same convergence measure as poisson_residual: max-norm residual of the
  // un-scaled equation, relative to max(|F|_inf, 1)
  double fmax = 0.0;
#pragma omp parallel for collapse(2) reduction(max : fmax) schedule(static)
  for (int k = k0; k < k1; ++k)
    for (int j = 1; j < g.ny - 1; ++j)
      for (int i = 1; i < g.nx - 1; ++i)
        fmax = std::max(fmax, std::fabs(rhs.v[g.index(i, j, k)]));
  const double denom = std::max(fmax, 1.0);

  auto rel_residual = [&](void) {
    double worst = 0.0;
#pragma omp parallel for collapse(2) reduction(max : worst) schedule(static)
    for (int k = k0; k < k1; ++k)
      for (int j = 1; j < g.ny - 1; ++j)
        for (int i = 1; i < g.nx - 1; ++i) {
          const std::size_t q = g.index(i, j, k);
          double lap = w.v[q - 1] + w.v[q + 1] + w.v[q - sy] + w.v[q + sy] -
                       twod * w.v[q];
          if (g.dim == 3) lap += w.v[q - sz] + w.v[q + sz];
          worst = std::max(worst, std::fabs(lap - h2 * rhs.v[q]));
        }
    return worst / (h2 * denom);
  };

  double rel = rel_residual();
  for (int iter = 0; iter < opts.max_iter && rel > opts.tol; ++iter) {
    // red-black sweeps: a node's stencil touches only the other color, so
    // each color pass is race-free and order-independent
    for (int color = 0; color < 2; ++color) {
#pragma omp parallel for collapse(2) schedule(static)
      for (int k = k0; k < k1; ++k)
        for (int j = 1; j < g.ny - 1; ++j)
          for (int i = 1; i < g.nx - 1; ++i) {
            if (((i + j + k) & 1) != color) continue;
            const std::size_t q = g.index(i, j, k);
            double s = w.v[q - 1] + w.v[q + 1] + w.v[q - sy] + w.v[q + sy];
            if (g.dim == 3) s += w.v[q - sz] + w.v[q + sz];
            const double gs = (s - h2 * rhs.v[q]) / twod;
            w.v[q] = (1.0 - omega) * w.v[q] + omega * gs;
          }
    }
    if ((iter & 7) == 7 || iter == opts.max_iter - 1) rel = rel_residual();
  }
  if (rel > opts.tol)
    throw convergence_failure("poisson: SOR hit max_iter", rel);
  return w;
}

}  // namespace

ScalarField solve_dirichlet(const ScalarField& rhs, const ScalarField& boundary,
                            const PoissonOptions& opts) {
  rhs.grid.validate();
  require_same_grid(rhs.grid, boundary.grid, "solve_dirichlet");
  if (opts.method == PoissonOptions::Method::spectral)
    return solve_spectral(rhs, boundary);
  return solve_sor(rhs, boundary, opts);
}

Transformation solve_vector(const VectorField& rhs, const Transformation& boundary,
                            const PoissonOptions& opts) {
  rhs.grid.validate();
  require_same_grid(rhs.grid, boundary.grid, "solve_vector");
  if (static_cast<int>(rhs.comp.size()) != rhs.grid.dim ||
      static_cast<int>(boundary.comp.size()) != boundary.grid.dim)
    throw dimension_error("solve_vector: component count must equal dim");
  Transformation out(rhs.grid);
  for (int c = 0; c < rhs.grid.dim; ++c)
    out.comp[c] = solve_dirichlet(rhs.comp[c], boundary.comp[c], opts);
  return out;
}

double poisson_residual(const ScalarField& w, const ScalarField& rhs) {
  require_same_grid(w.grid, rhs.grid, "poisson_residual");
  const GridSpec& g = w.grid;
  const double invh2 = 1.0 / (g.spacing * g.spacing);
  const std::size_t sy = static_cast<std::size_t>(g.nx);
  const std::size_t sz = static_cast<std::size_t>(g.nx) * g.ny;
  const int twod = 2 * g.dim;
  const int k0 = (g.dim == 3) ? 1 : 0;
  const int k1 = (g.dim == 3) ? g.nz - 1 : 1;
  double worst = 0.0;
  double fmax = 0.0;
#pragma omp parallel for collapse(2) reduction(max : worst, fmax) schedule(static)
  for (int k = k0; k < k1; ++k)
    for (int j = 1; j < g.ny - 1; ++j)
      for (int i = 1; i < g.nx - 1; ++i) {
        const std::size_t q = g.index(i, j, k);
        double lap = w.v[q - 1] + w.v[q + 1] + w.v[q - sy] + w.v[q + sy] -
                     twod * w.v[q];
        if (g.dim == 3) lap += w.v[q - sz] + w.v[q + sz];
        const double r = std::fabs(lap * invh2 - rhs.v[q]);
        if (r > worst) worst = r;
        const double f = std::fabs(rhs.v[q]);
        if (f > fmax) fmax = f;
      }
  return worst / std::max(fmax, 1.0);
}

}  // namespace morphokit
