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
#include <vector>

#include "doctest.h"
#include "morphokit/field_ops.hpp"
#include "morphokit/grid.hpp"
#include "morphokit/synth.hpp"
#include "morphokit/varcon.hpp"

using namespace morphokit;

namespace {

constexpr double kPi = 3.14159265358979323846;

GridSpec grid2(int nx, int ny, double spacing = 1.0) {
  GridSpec g;
  g.dim = 2;
  g.nx = nx;
  g.ny = ny;
  g.spacing = spacing;
  return g;
}

Transformation smooth_warp(const GridSpec& g, double amp, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double cx = u(rng), cy = u(rng);
  Transformation t = identity_transform(g);
  const double lx = (g.nx - 1) * g.spacing, ly = (g.ny - 1) * g.spacing;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double s =
          std::sin(kPi * g.coord(i) / lx) * std::sin(kPi * g.coord(j) / ly);
      t.comp[0].at(i, j) += amp * cx * s;
      t.comp[1].at(i, j) += amp * cy * s;
    }
  return t;
}

}  // namespace

TEST_CASE("normalize_f0 rescales to mean one and rejects non-positive data") {
  GridSpec g = grid2(7, 9);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  ScalarField f(g);
  for (double& v : f.v) v = u(rng);
  ScalarField n = normalize_f0(f);
  CHECK(field_mean(n) == doctest::Approx(1.0).epsilon(1e-14));
  f.v[10] = 0.0;
  CHECK_THROWS_AS(normalize_f0(f), non_positive_target);
  f.v[10] = -0.5;
  CHECK_THROWS_AS(normalize_f0(f), non_positive_target);
}

TEST_CASE("objective vanishes exactly on its own targets") {
  GridSpec g = grid2(15, 13, 0.7);
  Transformation t = smooth_warp(g, 0.3 * g.spacing, 3);
  ScalarField f0 = jacobian_det(t);
  ScalarField g0 = curl2d(t);
  CHECK(varcon_objective(t, f0, g0) == 0.0);
  // and is positive once the targets are someone else's
  Transformation s = smooth_warp(g, 0.3 * g.spacing, 4);
  CHECK(varcon_objective(s, f0, g0) > 0.0);
}

TEST_CASE("objective gradient matches central finite differences") {
  // the acceptance suite runs ten seeds; two here keep the build quick
  for (std::uint64_t seed : {11u, 12u}) {
    GridSpec g = grid2(9, 9, 1.0);
    Transformation t = smooth_warp(g, 0.4, seed);
    Transformation gen = smooth_warp(g, 0.5, seed + 100);
    ScalarField f0 = normalize_f0(jacobian_det(gen));
    ScalarField g0 = curl2d(gen);
    VectorField grad = varcon_gradient_wrt_T(t, f0, g0);
    const double eps = 1e-6;
    double worst = 0.0;
    double gmax = 0.0;
    for (int c = 0; c < 2; ++c)
      for (int j = 1; j < g.ny - 1; ++j)
        for (int i = 1; i < g.nx - 1; ++i) {
          Transformation tp = t, tm = t;
          tp.comp[static_cast<std::size_t>(c)].at(i, j) += eps;
          tm.comp[static_cast<std::size_t>(c)].at(i, j) -= eps;
          const double fd = (varcon_objective(tp, f0, g0) -
                             varcon_objective(tm, f0, g0)) /
                            (2 * eps);
          const double an = grad.comp[static_cast<std::size_t>(c)].at(i, j);
          worst = std::max(worst, std::abs(fd - an));
          gmax = std::max(gmax, std::abs(an));
        }
    CHECK(worst / std::max(gmax, 1e-30) < 1e-6);
    // boundary nodes are not free, their gradient is identically zero
    for (int c = 0; c < 2; ++c)
      for (int i = 0; i < g.nx; ++i) {
        CHECK(grad.comp[static_cast<std::size_t>(c)].at(i, 0) == 0.0);
        CHECK(grad.comp[static_cast<std::size_t>(c)].at(i, g.ny - 1) == 0.0);
      }
  }
}

TEST_CASE("solve is a no-op when the start already meets the targets") {
  GridSpec g = grid2(13, 13);
  Transformation id = identity_transform(g);
  VarConProblem p;
  p.f0 = jacobian_det(id);
  p.g0 = curl2d(id);
  auto [t, rep] = varcon_solve(p);
  CHECK(rep.steps_taken == 0);
  CHECK(rep.termination == Termination::converged);
  CHECK(max_node_distance(t, id) == 0.0);
}

TEST_CASE("solve reaches prescribed (J, curl) from the identity") {
  GridSpec g = grid2(17, 17, 1.0);
  Transformation gen = smooth_warp(g, 0.35, 21);
  VarConProblem p;
  p.f0 = normalize_f0(jacobian_det(gen));
  p.g0 = curl2d(gen);
  auto [t, rep] = varcon_solve(p);
  REQUIRE(rep.objective_trace.size() >= 2);
  CHECK(rep.objective_trace.back() < 1e-3 * rep.objective_trace.front());
  for (std::size_t s = 1; s < rep.objective_trace.size(); ++s)
    CHECK(rep.objective_trace[s] < rep.objective_trace[s - 1]);
  // boundary stays pinned bitwise: iterates are Dirichlet solves
  CHECK(boundary_displacement(t) == 0.0);
  CHECK(rep.min_jacobian > 0.05);
  // (J, curl) plus the pinned boundary identify the map
  CHECK(max_node_distance(t, gen) <= 0.5 * g.spacing);
}

TEST_CASE("solve rejects a start that moves the boundary") {
  GridSpec g = grid2(9, 9);
  Transformation bad = identity_transform(g);
  bad.comp[0].at(0, 4) += 1.0;
  VarConProblem p;
  p.f0 = jacobian_det(identity_transform(g));
  p.g0 = curl2d(identity_transform(g));
  p.T_init = bad;
  CHECK_THROWS_AS(varcon_solve(p), spec_out_of_range);
}

TEST_CASE("averaging the six-member family lands on the identity") {
  GridSpec g = grid2(49, 49, 1.0);
  std::vector<Transformation> fam = make_family6(g, 2);
  auto [avg, rep] = average_transformations(fam);
  CHECK(max_displacement(avg) <= 0.5 * g.spacing);
  CHECK(rep.min_jacobian > 0.5);
}

TEST_CASE("averaging targets are permutation-invariant bitwise") {
  GridSpec g = grid2(49, 49, 1.0);
  std::vector<Transformation> fam = make_family6(g, 9);
  auto [f0a, g0a] = averaging_targets(fam);
  std::vector<Transformation> rev(fam.rbegin(), fam.rend());
  auto [f0b, g0b] = averaging_targets(rev);
  for (std::size_t p = 0; p < f0a.v.size(); ++p) {
    CHECK(f0a.v[p] == f0b.v[p]);
    CHECK(g0a.v[p] == g0b.v[p]);
  }
}

TEST_CASE("averaging a singleton reproduces the member") {
  GridSpec g = grid2(17, 17, 1.0);
  Transformation gen = smooth_warp(g, 0.3, 31);
  std::vector<Transformation> ts{gen};
  auto [avg, rep] = average_transformations(ts);
  CHECK(max_node_distance(avg, gen) <= 0.5 * g.spacing);
  const double w[] = {1.0};
  auto [avgw, repw] = average_transformations(ts, w);
  CHECK(max_node_distance(avg, avgw) == 0.0);
}

TEST_CASE("averaging validates its inputs") {
  GridSpec g = grid2(17, 17);
  std::vector<Transformation> ts{identity_transform(g)};
  CHECK_THROWS_AS(averaging_targets({}), empty_input);
  const double bad_sum[] = {0.9};
  CHECK_THROWS_AS(averaging_targets(ts, bad_sum), spec_out_of_range);
  std::vector<Transformation> two{identity_transform(g), identity_transform(g)};
  const double neg[] = {1.5, -0.5};
  CHECK_THROWS_AS(averaging_targets(two, neg), spec_out_of_range);
  CHECK_THROWS_AS(averaging_targets(std::vector<Transformation>{
                      identity_transform(grid2(5, 5, 1.0)),
                      identity_transform(grid2(7, 5, 1.0))}),
                  grid_mismatch);
}
