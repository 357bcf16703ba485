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

#include "morphokit/varcon.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include "morphokit/field_ops.hpp"
#include "morphokit/parallel.hpp"

namespace morphokit {

namespace {

void validate_targets(const ScalarField& f0, const ScalarField& g0) {
  f0.grid.validate();
  require_same_grid(f0.grid, g0.grid, "varcon targets");
  if (f0.grid.dim != 2)
    throw dimension_error("varcon: prescribed-curl construction is 2D");
  double mn = std::numeric_limits<double>::infinity();
#pragma omp parallel for reduction(min : mn) schedule(static)
  for (long long q = 0; q < static_cast<long long>(f0.size()); ++q)
    mn = std::min(mn, f0.v[q]);
  if (!(mn > 0.0))
    throw non_positive_target("varcon: target Jacobian must be positive everywhere");
}

// residual pair: h^2-weighted interior sums of (J-f0)^2 and (curl-g0)^2
std::pair<double, double> residuals(const Transformation& t,
                                    const ScalarField& f0,
                                    const ScalarField& g0) {
  const GridSpec& g = t.grid;
  const ScalarField J = jacobian_det(t);
  const ScalarField C = curl2d(t);
  const double h2 = g.spacing * g.spacing;
  const double rj = deterministic_sum(g, [&](int i, int j, int) {
    if (i == 0 || i == g.nx - 1 || j == 0 || j == g.ny - 1) return 0.0;
    const std::size_t q = g.index(i, j);
    const double d = J.v[q] - f0.v[q];
    return d * d;
  });
  const double rc = deterministic_sum(g, [&](int i, int j, int) {
    if (i == 0 || i == g.nx - 1 || j == 0 || j == g.ny - 1) return 0.0;
    const std::size_t q = g.index(i, j);
    const double d = C.v[q] - g0.v[q];
    return d * d;
  });
  return {rj * h2, rc * h2};
}

std::pair<double, double> interior_j_range(const Transformation& t) {
  const ScalarField J = jacobian_det(t);
  const GridSpec& g = t.grid;
  double mn = std::numeric_limits<double>::infinity();
  double mx = -std::numeric_limits<double>::infinity();
#pragma omp parallel for reduction(min : mn) reduction(max : mx) schedule(static)
  for (int j = 1; j < g.ny - 1; ++j)
    for (int i = 1; i < g.nx - 1; ++i) {
      const double v = J.v[g.index(i, j)];
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
  return {mn, mx};
}

}  // namespace

ScalarField normalize_f0(const ScalarField& f) {
  f.grid.validate();
  double mn = std::numeric_limits<double>::infinity();
#pragma omp parallel for reduction(min : mn) schedule(static)
  for (long long q = 0; q < static_cast<long long>(f.size()); ++q)
    mn = std::min(mn, f.v[q]);
  if (!(mn > 0.0))
    throw non_positive_target("normalize_f0: values must be positive everywhere");
  const double mean = field_mean(f);
  ScalarField out(f.grid);
  const double inv = 1.0 / mean;
#pragma omp parallel for schedule(static)
  for (long long q = 0; q < static_cast<long long>(f.size()); ++q)
    out.v[q] = f.v[q] * inv;
  return out;
}

double varcon_objective(const Transformation& t, const ScalarField& f0,
                        const ScalarField& g0) {
  require_same_grid(t.grid, f0.grid, "varcon_objective");
  const auto [rj, rc] = residuals(t, f0, g0);
  return rj + rc;
}

VectorField varcon_gradient_wrt_T(const Transformation& t, const ScalarField& f0,
                                  const ScalarField& g0) {
  require_same_grid(t.grid, f0.grid, "varcon_gradient_wrt_T");
  require_same_grid(t.grid, g0.grid, "varcon_gradient_wrt_T");
  if (t.grid.dim != 2) throw dimension_error("varcon_gradient_wrt_T: 2D only");
  const GridSpec& g = t.grid;
  const double h2 = g.spacing * g.spacing;

  const ScalarField J = jacobian_det(t);
  const ScalarField C = curl2d(t);
  const ScalarField t1x = derivative(t.comp[0], 0);
  const ScalarField t1y = derivative(t.comp[0], 1);
  const ScalarField t2x = derivative(t.comp[1], 0);
  const ScalarField t2y = derivative(t.comp[1], 1);

  // interior residual weights; zero on the boundary so the adjoint stencils
  // below can treat every product field as zero-extended
  ScalarField aY2(g), aX2b(g), aX1(g), aY1b(g);
#pragma omp parallel for schedule(static)
  for (int j = 1; j < g.ny - 1; ++j)
    for (int i = 1; i < g.nx - 1; ++i) {
      const std::size_t q = g.index(i, j);
      const double a = 2.0 * h2 * (J.v[q] - f0.v[q]);
      const double b = 2.0 * h2 * (C.v[q] - g0.v[q]);
      aY2.v[q] = a * t2y.v[q];
      aX2b.v[q] = a * t2x.v[q] + b;
      aX1.v[q] = a * t1x.v[q];
      aY1b.v[q] = a * t1y.v[q] - b;
    }

  // dE/dT1 = -Dx(a*T2y) + Dy(a*T2x + b)
  // dE/dT2 = +Dx(a*T1y - b) - Dy(a*T1x)
  // with plain central differences of the zero-extended products; entries on
  // the boundary itself are not free, their gradient stays zero.
  VectorField out(g);
  const double inv2h = 1.0 / (2.0 * g.spacing);
  const std::size_t sy = static_cast<std::size_t>(g.nx);
#pragma omp parallel for schedule(static)
  for (int j = 1; j < g.ny - 1; ++j)
    for (int i = 1; i < g.nx - 1; ++i) {
      const std::size_t q = g.index(i, j);
      const double dxaY2 = (aY2.v[q + 1] - aY2.v[q - 1]) * inv2h;
      const double dyaX2b = (aX2b.v[q + sy] - aX2b.v[q - sy]) * inv2h;
      const double dxaY1b = (aY1b.v[q + 1] - aY1b.v[q - 1]) * inv2h;
      const double dyaX1 = (aX1.v[q + sy] - aX1.v[q - sy]) * inv2h;
      out.comp[0].v[q] = -dxaY2 + dyaX2b;
      out.comp[1].v[q] = dxaY1b - dyaX1;
    }
  return out;
}

std::pair<Transformation, SolverReport> varcon_solve(const VarConProblem& problem,
                                                     const DescentOptions& opts,
                                                     const PoissonOptions& poisson) {
  validate_targets(problem.f0, problem.g0);
  const GridSpec& g = problem.f0.grid;
  const Transformation id = identity_transform(g);

  Transformation T = id;
  if (problem.T_init) {
    require_same_grid(problem.T_init->grid, g, "varcon_solve T_init");
    if (boundary_displacement(*problem.T_init) > 1e-9 * g.spacing)
      throw spec_out_of_range("varcon_solve: T_init must be identity on the boundary");
    T = *problem.T_init;
  }

  VectorField F(g);
  for (int c = 0; c < 2; ++c) F.comp[c] = laplacian_interior(T.comp[c]);

  SolverReport rep;
  double E = varcon_objective(T, problem.f0, problem.g0);
  rep.objective_trace.push_back(E);

  double step = opts.step;
  int consec_small = 0;
  rep.termination = Termination::max_steps;
  const ScalarField zero(g);

  if (E == 0.0) rep.termination = Termination::converged;

  while (E > 0.0 && rep.steps_taken < opts.max_steps &&
         rep.termination == Termination::max_steps) {
    const VectorField gT = varcon_gradient_wrt_T(T, problem.f0, problem.g0);
    VectorField gF(g);
    for (int c = 0; c < 2; ++c)
      gF.comp[c] = solve_dirichlet(gT.comp[c], zero, poisson);

    bool accepted = false;
    double rel = 0.0;
    for (int halvings = 0; halvings <= opts.max_halvings; ++halvings) {
      VectorField F_try(g);
      for (int c = 0; c < 2; ++c) {
        const std::size_t n = g.node_count();
#pragma omp parallel for schedule(static)
        for (long long q = 0; q < static_cast<long long>(n); ++q)
          F_try.comp[c].v[q] = F.comp[c].v[q] - step * gF.comp[c].v[q];
      }
      Transformation T_try = solve_vector(F_try, id, poisson);
      const double E_try = varcon_objective(T_try, problem.f0, problem.g0);
      if (E_try < E && min_interior_jacobian(T_try) > opts.jmin_guard) {
        rel = (E - E_try) / E;
        F = std::move(F_try);
        T = std::move(T_try);
        E = E_try;
        rep.objective_trace.push_back(E);
        ++rep.steps_taken;
        if (halvings == 0) step *= 1.25;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      rep.termination = Termination::guard_halt;
      break;
    }
    if (E == 0.0) {
      rep.termination = Termination::converged;
      break;
    }
    if (rel < opts.obj_tol) {
      if (++consec_small >= 5) {
        rep.termination = Termination::converged;
        break;
      }
    } else {
      consec_small = 0;
    }
  }
  if (E == 0.0) rep.termination = Termination::converged;

  const auto [mn, mx] = interior_j_range(T);
  rep.min_jacobian = mn;
  rep.max_jacobian = mx;
  const auto [rj, rc] = residuals(T, problem.f0, problem.g0);
  rep.residual_jacobian = rj;
  rep.residual_curl = rc;
  T.diffeomorphic = mn > 0.0;
  return {std::move(T), std::move(rep)};
}

std::pair<ScalarField, ScalarField> averaging_targets(
    std::span<const Transformation> ts, std::span<const double> weights) {
  if (ts.empty()) throw empty_input("averaging_targets: no transformations");
  const GridSpec& g = ts[0].grid;
  g.validate();
  if (g.dim != 2) throw dimension_error("averaging_targets: 2D only");
  for (const auto& t : ts) require_same_grid(t.grid, g, "averaging_targets");

  const std::size_t n = ts.size();
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  if (!weights.empty()) {
    if (weights.size() != n)
      throw spec_out_of_range("averaging_targets: weight count mismatch");
    double sum = 0.0;
    for (double x : weights) {
      if (!(x > 0.0)) throw spec_out_of_range("averaging_targets: weights must be positive");
      sum += x;
    }
    if (std::fabs(sum - 1.0) > 1e-12)
      throw spec_out_of_range("averaging_targets: weights must sum to 1");
    std::copy(weights.begin(), weights.end(), w.begin());
  }

  std::vector<ScalarField> J(n), C(n);
  for (std::size_t m = 0; m < n; ++m) {
    J[m] = jacobian_det(ts[m]);
    C[m] = curl2d(ts[m]);
  }

  // per node, sort the weighted member terms before adding them: the sum
  // becomes invariant (bitwise) under permutation of the inputs
  ScalarField f0raw(g), g0(g);
  const std::size_t nodes = g.node_count();
#pragma omp parallel
  {
    std::vector<double> terms(n);
#pragma omp for schedule(static)
    for (long long q = 0; q < static_cast<long long>(nodes); ++q) {
      for (std::size_t m = 0; m < n; ++m) terms[m] = w[m] * J[m].v[q];
      std::sort(terms.begin(), terms.end());
      double s = 0.0;
      for (double x : terms) s += x;
      f0raw.v[q] = s;

      for (std::size_t m = 0; m < n; ++m) terms[m] = w[m] * C[m].v[q];
      std::sort(terms.begin(), terms.end());
      s = 0.0;
      for (double x : terms) s += x;
      g0.v[q] = s;
    }
  }
  return {normalize_f0(f0raw), std::move(g0)};
}

std::pair<Transformation, SolverReport> average_transformations(
    std::span<const Transformation> ts, std::span<const double> weights,
    const DescentOptions& opts, const PoissonOptions& poisson) {
  auto [f0, g0] = averaging_targets(ts, weights);
  VarConProblem problem;
  problem.f0 = std::move(f0);
  problem.g0 = std::move(g0);
  return varcon_solve(problem, opts, poisson);
}

}  // namespace morphokit
