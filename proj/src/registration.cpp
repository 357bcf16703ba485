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

#include "morphokit/registration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "morphokit/field_ops.hpp"
#include "morphokit/parallel.hpp"

namespace morphokit {

namespace {

bool is_constant(const Image& img) {
  double mn = std::numeric_limits<double>::infinity();
  double mx = -mn;
#pragma omp parallel for reduction(min : mn) reduction(max : mx) schedule(static)
  for (long long q = 0; q < static_cast<long long>(img.size()); ++q) {
    mn = std::min(mn, img.v[q]);
    mx = std::max(mx, img.v[q]);
  }
  return mx - mn == 0.0;
}

Image restrict_image(const Image& fine) {
  const GridSpec& gf = fine.grid;
  GridSpec gc = gf;
  gc.nx = (gf.nx + 1) / 2;
  gc.ny = (gf.ny + 1) / 2;
  if (gf.dim == 3) gc.nz = (gf.nz + 1) / 2;
  gc.spacing = gf.spacing * 2.0;

  // one smoothing pass, then decimate even-index nodes
  Image sm = fine;
  const std::size_t sy = static_cast<std::size_t>(gf.nx);
  const std::size_t sz = static_cast<std::size_t>(gf.nx) * gf.ny;
  const int k0 = (gf.dim == 3) ? 1 : 0;
  const int k1 = (gf.dim == 3) ? gf.nz - 1 : 1;
#pragma omp parallel for collapse(2) schedule(static)
  for (int k = k0; k < k1; ++k)
    for (int j = 1; j < gf.ny - 1; ++j)
      for (int i = 1; i < gf.nx - 1; ++i) {
        const std::size_t q = gf.index(i, j, k);
        double s = fine.v[q] + fine.v[q - 1] + fine.v[q + 1] + fine.v[q - sy] +
                   fine.v[q + sy];
        double w = 5.0;
        if (gf.dim == 3) {
          s += fine.v[q - sz] + fine.v[q + sz];
          w = 7.0;
        }
        sm.v[q] = s / w;
      }

  Image out(gc);
  const int nzc = (gc.dim == 3) ? gc.nz : 1;
#pragma omp parallel for collapse(2) schedule(static)
  for (int k = 0; k < nzc; ++k)
    for (int j = 0; j < gc.ny; ++j)
      for (int i = 0; i < gc.nx; ++i)
        out.v[gc.index(i, j, k)] = sm.v[gf.index(2 * i, 2 * j, 2 * k)];
  return out;
}

// Displacement of the coarse map sampled at fine node positions, added to the
// fine identity. Both grids span the same physical box.
Transformation prolong_map(const Transformation& coarse, const GridSpec& gf) {
  const GridSpec& gc = coarse.grid;
  Transformation out = identity_transform(gf);
  std::vector<ScalarField> disp(static_cast<std::size_t>(gc.dim), ScalarField(gc));
  const Transformation idc = identity_transform(gc);
  for (int c = 0; c < gc.dim; ++c) {
    const std::size_t n = gc.node_count();
#pragma omp parallel for schedule(static)
    for (long long q = 0; q < static_cast<long long>(n); ++q)
      disp[c].v[q] = coarse.comp[c].v[q] - idc.comp[c].v[q];
  }
  const int nz = (gf.dim == 3) ? gf.nz : 1;
#pragma omp parallel for collapse(2) schedule(static)
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < gf.ny; ++j)
      for (int i = 0; i < gf.nx; ++i) {
        if (gf.on_boundary(i, j, k)) continue;
        const std::size_t q = gf.index(i, j, k);
        const double x = gf.coord(i), y = gf.coord(j), z = gf.coord(k);
        for (int c = 0; c < gf.dim; ++c)
          out.comp[c].v[q] += sample_field(disp[c], x, y, z);
      }
  return out;
}

RegistrationResult descend(const Image& moving, const Image& fixed,
                           const Transformation& phi0,
                           const RegistrationOptions& opts,
                           const PoissonOptions& poisson) {
  const GridSpec& g = moving.grid;
  const Transformation id = identity_transform(g);
  const ScalarField zero(g);

  RegistrationResult res;
  res.phi = phi0;

  double E = ssd(resample(moving, res.phi), fixed);
  res.ssd_trace.push_back(E);

  if (is_constant(moving) && is_constant(fixed)) {
    res.phi = id;
    res.min_jacobian = 1.0;
    res.termination = RegTermination::degenerate;
    res.note = "both images constant; returning identity";
    res.phi.diffeomorphic = true;
    return res;
  }

  double step = opts.step;
  int consec_small = 0;
  int steps = 0;
  res.termination = RegTermination::max_steps;

  const int inner_steps = std::max(1, opts.inner_steps);
  while (E > 0.0 && steps < opts.outer_max &&
         res.termination == RegTermination::max_steps) {
    // build the update map xi = x + u (inner_steps gradient solves), then
    // try phi(xi); backtrack on the whole update if it does not help.
    // with a single inner step the direction is independent of the step
    // length, so gradient and solve happen once per outer step.
    // solve_dirichlet inverts the negative definite lattice laplacian, so
    // the smoothed descent displacement -step*(-lap)^{-1} grad is +step*du
    std::vector<ScalarField> du;
    if (inner_steps == 1) {
      const VectorField grad = ssd_gradient(moving, fixed, res.phi);
      du.reserve(static_cast<std::size_t>(g.dim));
      for (int c = 0; c < g.dim; ++c)
        du.push_back(solve_dirichlet(grad.comp[c], zero, poisson));
    }
    bool accepted = false;
    double rel = 0.0;
    for (int halvings = 0; halvings <= opts.max_halvings; ++halvings) {
      Transformation xi = id;
      if (inner_steps == 1) {
        const std::size_t n = g.node_count();
        for (int c = 0; c < g.dim; ++c) {
#pragma omp parallel for schedule(static)
          for (long long q = 0; q < static_cast<long long>(n); ++q)
            xi.comp[c].v[q] += step * du[c].v[q];
        }
      } else {
        for (int inner = 0; inner < inner_steps; ++inner) {
          const Transformation cur =
              (inner == 0) ? res.phi : compose(res.phi, xi);
          const VectorField grad = ssd_gradient(moving, fixed, cur);
          for (int c = 0; c < g.dim; ++c) {
            const ScalarField step_du = solve_dirichlet(grad.comp[c], zero, poisson);
            const std::size_t n = g.node_count();
#pragma omp parallel for schedule(static)
            for (long long q = 0; q < static_cast<long long>(n); ++q)
              xi.comp[c].v[q] += step * step_du.v[q];
          }
        }
      }
      Transformation phi_try = compose(res.phi, xi);
      const double E_try = ssd(resample(moving, phi_try), fixed);
      if (E_try < E && min_interior_jacobian(phi_try) > opts.jmin_guard) {
        rel = (E - E_try) / E;
        res.phi = std::move(phi_try);
        E = E_try;
        res.ssd_trace.push_back(E);
        ++steps;
        if (halvings == 0) step *= 1.25;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      res.termination = RegTermination::step_exhausted;
      break;
    }
    if (E == 0.0) {
      res.termination = RegTermination::converged;
      break;
    }
    if (rel < opts.ssd_tol) {
      if (++consec_small >= 5) {
        res.termination = RegTermination::converged;
        break;
      }
    } else {
      consec_small = 0;
    }
  }
  if (E == 0.0) res.termination = RegTermination::converged;

  res.min_jacobian = min_interior_jacobian(res.phi);
  res.phi.diffeomorphic = res.min_jacobian > 0.0;
  return res;
}

}  // namespace

VectorField ssd_gradient(const Image& moving, const Image& fixed,
                         const Transformation& phi) {
  require_same_grid(moving.grid, fixed.grid, "ssd_gradient");
  require_same_grid(moving.grid, phi.grid, "ssd_gradient");
  const GridSpec& g = moving.grid;
  double w = g.spacing * g.spacing;
  if (g.dim == 3) w *= g.spacing;

  VectorField out(g);
  const double* p1 = phi.comp[0].v.data();
  const double* p2 = phi.comp[1].v.data();
  const double* p3 = (g.dim == 3) ? phi.comp[2].v.data() : nullptr;
  const int nz = (g.dim == 3) ? g.nz : 1;
  const int k0 = (g.dim == 3) ? 1 : 0;
  const int k1 = (g.dim == 3) ? nz - 1 : 1;
#pragma omp parallel for collapse(2) schedule(static)
  for (int k = k0; k < k1; ++k)
    for (int j = 1; j < g.ny - 1; ++j)
      for (int i = 1; i < g.nx - 1; ++i) {
        const std::size_t q = g.index(i, j, k);
        double val, grad[3] = {0.0, 0.0, 0.0};
        sample_image_with_gradient(moving, p1[q], p2[q], p3 ? p3[q] : 0.0,
                                   &val, grad);
        const double r = 2.0 * w * (val - fixed.v[q]);
        for (int c = 0; c < g.dim; ++c) out.comp[c].v[q] = r * grad[c];
      }
  return out;
}

RegistrationResult register_images_from(const Image& moving, const Image& fixed,
                                        const Transformation& phi0,
                                        const RegistrationOptions& opts,
                                        const PoissonOptions& poisson) {
  moving.grid.validate();
  require_same_grid(moving.grid, fixed.grid, "register_images");
  require_same_grid(moving.grid, phi0.grid, "register_images");
  if (boundary_displacement(phi0) > 1e-9 * moving.grid.spacing)
    throw spec_out_of_range("register_images: phi0 must be identity on the boundary");
  return descend(moving, fixed, phi0, opts, poisson);
}

RegistrationResult register_images(const Image& moving, const Image& fixed,
                                   const RegistrationOptions& opts,
                                   const PoissonOptions& poisson) {
  moving.grid.validate();
  require_same_grid(moving.grid, fixed.grid, "register_images");
  if (opts.levels <= 1)
    return descend(moving, fixed, identity_transform(moving.grid), opts, poisson);

  // coarse-to-fine: restriction needs odd extents at every level
  std::vector<Image> mv{moving}, fx{fixed};
  for (int l = 1; l < opts.levels; ++l) {
    const GridSpec& g = mv.back().grid;
    const bool odd = (g.nx % 2 == 1) && (g.ny % 2 == 1) &&
                     (g.dim == 2 || g.nz % 2 == 1);
    const bool big = g.nx >= 5 && g.ny >= 5 && (g.dim == 2 || g.nz >= 5);
    if (!odd || !big)
      throw spec_out_of_range(
          "register_images: multiresolution needs odd extents >= 5 per level");
    mv.push_back(restrict_image(mv.back()));
    fx.push_back(restrict_image(fx.back()));
  }
  RegistrationOptions level_opts = opts;
  level_opts.levels = 1;
  Transformation phi = identity_transform(mv.back().grid);
  RegistrationResult res;
  for (int l = opts.levels - 1; l >= 0; --l) {
    res = descend(mv[l], fx[l], phi, level_opts, poisson);
    if (l > 0) phi = prolong_map(res.phi, mv[l - 1].grid);
  }
  return res;
}

}  // namespace morphokit
