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

#include <cmath>
#include <random>

#include "doctest.h"
#include "morphokit/field_ops.hpp"
#include "morphokit/grid.hpp"
#include "morphokit/poisson.hpp"

using namespace morphokit;

namespace {

GridSpec grid2(int nx, int ny, double spacing = 1.0) {
  GridSpec g;
  g.dim = 2;
  g.nx = nx;
  g.ny = ny;
  g.spacing = spacing;
  return g;
}

GridSpec grid3(int n, double spacing = 1.0) {
  GridSpec g;
  g.dim = 3;
  g.nx = g.ny = g.nz = n;
  g.spacing = spacing;
  return g;
}

ScalarField random_field(const GridSpec& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ScalarField f(g);
  for (double& v : f.v) v = u(rng);
  return f;
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t p = 0; p < a.v.size(); ++p)
    m = std::max(m, std::abs(a.v[p] - b.v[p]));
  return m;
}

}  // namespace

TEST_CASE("spectral solve inverts the stencil: manufactured discrete solution") {
  // pick w, apply the discrete Laplacian to get the rhs, solve, recover w
  for (const GridSpec& g :
       {grid2(17, 23, 0.7), grid2(33, 33, 1.0), grid2(16, 20, 0.5)}) {
    ScalarField w = random_field(g, 3);
    ScalarField rhs = laplacian_interior(w);
    ScalarField sol = solve_dirichlet(rhs, w);  // boundary trace from w
    CHECK(max_abs_diff(sol, w) < 1e-9);
    CHECK(poisson_residual(sol, rhs) < 1e-10);
  }
}

TEST_CASE("affine data with zero rhs is reproduced exactly") {
  GridSpec g = grid2(19, 15, 0.31);
  ScalarField w(g), zero(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      w.at(i, j) = 0.3 + 1.7 * g.coord(i) - 0.6 * g.coord(j);
  for (PoissonOptions::Method m :
       {PoissonOptions::Method::spectral, PoissonOptions::Method::iterative}) {
    PoissonOptions opts;
    opts.method = m;
    ScalarField sol = solve_dirichlet(zero, w, opts);
    CHECK(max_abs_diff(sol, w) < 1e-11);
  }
}

TEST_CASE("iterative and spectral solvers agree") {
  GridSpec g = grid2(21, 27, 1.0);
  ScalarField rhs = random_field(g, 11);
  ScalarField bnd = random_field(g, 12);
  ScalarField a = solve_dirichlet(rhs, bnd);
  PoissonOptions it;
  it.method = PoissonOptions::Method::iterative;
  it.tol = 1e-12;
  ScalarField b = solve_dirichlet(rhs, bnd, it);
  CHECK(max_abs_diff(a, b) < 1e-8);
  CHECK(poisson_residual(a, rhs) < 1e-10);
  CHECK(poisson_residual(b, rhs) < 1e-10);
}

TEST_CASE("3D spectral solve inverts the 7-point stencil") {
  GridSpec g = grid3(13, 0.8);
  ScalarField w = random_field(g, 7);
  ScalarField rhs = laplacian_interior(w);
  ScalarField sol = solve_dirichlet(rhs, w);
  CHECK(max_abs_diff(sol, w) < 1e-9);
  CHECK(poisson_residual(sol, rhs) < 1e-10);
}

TEST_CASE("vector solve equals per-component scalar solves") {
  GridSpec g = grid2(15, 13, 0.9);
  VectorField rhs(g);
  rhs.comp[0] = random_field(g, 21);
  rhs.comp[1] = random_field(g, 22);
  Transformation bnd = identity_transform(g);
  Transformation sol = solve_vector(rhs, bnd);
  for (int c = 0; c < 2; ++c) {
    ScalarField sc = solve_dirichlet(rhs.comp[static_cast<std::size_t>(c)],
                                     bnd.comp[static_cast<std::size_t>(c)]);
    CHECK(max_abs_diff(sol.comp[static_cast<std::size_t>(c)], sc) == 0.0);
  }
}

TEST_CASE("residual diagnostic is zero for a consistent pair") {
  GridSpec g = grid2(14, 17, 0.6);
  ScalarField w = random_field(g, 31);
  // the rhs produced by the same stencil the residual uses
  CHECK(poisson_residual(w, laplacian_interior(w)) < 1e-14);
}

TEST_CASE("iterative solver reports failure when starved of sweeps") {
  GridSpec g = grid2(33, 33);
  ScalarField rhs = random_field(g, 41);
  ScalarField bnd(g);
  PoissonOptions opts;
  opts.method = PoissonOptions::Method::iterative;
  opts.max_iter = 2;
  bool threw = false;
  try {
    solve_dirichlet(rhs, bnd, opts);
  } catch (const convergence_failure& e) {
    threw = true;
    CHECK(e.residual() > opts.tol);
  }
  CHECK(threw);
}
