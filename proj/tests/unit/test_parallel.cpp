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
#include <cstdlib>
#include <random>
#include <vector>

#include "doctest.h"
#include "morphokit/field_ops.hpp"
#include "morphokit/grid.hpp"
#include "morphokit/parallel.hpp"
#include "morphokit/poisson.hpp"
#include "morphokit/registration.hpp"
#include "morphokit/synth.hpp"
#include "morphokit/varcon.hpp"

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

ScalarField random_field(const GridSpec& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ScalarField f(g);
  for (double& v : f.v) v = u(rng);
  return f;
}

Image random_image(const GridSpec& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Image img(g);
  for (double& v : img.v) v = u(rng);
  return img;
}

bool bitwise_equal(const ScalarField& a, const ScalarField& b) {
  for (std::size_t p = 0; p < a.v.size(); ++p)
    if (a.v[p] != b.v[p]) return false;
  return true;
}

}  // namespace

TEST_CASE("deterministic_sum equals a plain serial sum bitwise") {
  GridSpec g = grid2(23, 17, 0.6);
  ScalarField f = random_field(g, 3);
  double serial = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) serial += f.at(i, j);
  const double par = deterministic_sum(
      g, [&](int i, int j, int k) { return f.at(i, j, k); });
  CHECK(par == serial);

  GridSpec g3;
  g3.dim = 3;
  g3.nx = 7;
  g3.ny = 9;
  g3.nz = 5;
  g3.spacing = 1.0;
  ScalarField f3 = random_field(g3, 4);
  double serial3 = 0.0;
  for (int k = 0; k < g3.nz; ++k)
    for (int j = 0; j < g3.ny; ++j)
      for (int i = 0; i < g3.nx; ++i) serial3 += f3.at(i, j, k);
  const double par3 = deterministic_sum(
      g3, [&](int i, int j, int k) { return f3.at(i, j, k); });
  CHECK(par3 == serial3);
}

TEST_CASE("thread cap bookkeeping") {
  const int before = thread_cap();
  set_thread_cap(3);
  CHECK(thread_cap() == 3);
  set_thread_cap(0);  // no-op
  CHECK(thread_cap() == 3);
  set_thread_cap(-2);  // no-op
  CHECK(thread_cap() == 3);
  set_thread_cap(before > 0 ? before : 1);
}

TEST_CASE("thread cap from the environment") {
  setenv("MORPHOKIT_THREADS", "5", 1);
  CHECK(thread_cap_from_env() == 5);
  setenv("MORPHOKIT_THREADS", "garbage", 1);
  CHECK(thread_cap_from_env() == 0);
  setenv("MORPHOKIT_THREADS", "-4", 1);
  CHECK(thread_cap_from_env() == 0);
  unsetenv("MORPHOKIT_THREADS");
  CHECK(thread_cap_from_env() == 0);
}

TEST_CASE("kernels are bitwise identical across thread caps") {
  GridSpec g = grid2(33, 33, 0.8);
  auto pair = make_rotational_pair(g, default_rotational_spec(g));
  ScalarField rhs = random_field(g, 7);
  ScalarField bnd = random_field(g, 8);
  Image ia = random_image(g, 9);
  Image ib = random_image(g, 10);

  struct Outputs {
    ScalarField jac, curl, sol_sp, sol_it;
    Image res;
    double ssd_v = 0.0;
  };
  auto run_all = [&](int cap) {
    set_thread_cap(cap);
    Outputs o;
    o.jac = jacobian_det(pair.first);
    o.curl = curl2d(pair.first);
    o.sol_sp = solve_dirichlet(rhs, bnd);
    PoissonOptions it;
    it.method = PoissonOptions::Method::iterative;
    o.sol_it = solve_dirichlet(rhs, bnd, it);
    o.res = resample(ia, pair.first);
    o.ssd_v = ssd(ia, ib);
    return o;
  };
  Outputs one = run_all(1);
  for (int cap : {2, 8}) {
    Outputs many = run_all(cap);
    CHECK(bitwise_equal(one.jac, many.jac));
    CHECK(bitwise_equal(one.curl, many.curl));
    CHECK(bitwise_equal(one.sol_sp, many.sol_sp));
    CHECK(bitwise_equal(one.sol_it, many.sol_it));
    bool img_eq = true;
    for (std::size_t p = 0; p < one.res.v.size(); ++p)
      if (one.res.v[p] != many.res.v[p]) img_eq = false;
    CHECK(img_eq);
    CHECK(one.ssd_v == many.ssd_v);
  }
  set_thread_cap(1);
}

TEST_CASE("solvers are bitwise identical across thread caps") {
  GridSpec g = grid2(33, 33, 1.0);
  auto [d1, d2] = make_rotational_pair(g, default_rotational_spec(g));
  VarConProblem p;
  p.f0 = normalize_f0(jacobian_det(d2));
  p.g0 = curl2d(d2);
  DescentOptions dopts;
  dopts.max_steps = 40;
  Image fixed = make_test_image(g, "rings", 3);
  Image moving = resample(fixed, d1);
  RegistrationOptions ropts;
  ropts.outer_max = 40;

  set_thread_cap(1);
  auto [t1, rep1] = varcon_solve(p, dopts);
  RegistrationResult r1 = register_images(moving, fixed, ropts);
  set_thread_cap(8);
  auto [t8, rep8] = varcon_solve(p, dopts);
  RegistrationResult r8 = register_images(moving, fixed, ropts);
  set_thread_cap(1);

  CHECK(max_node_distance(t1, t8) == 0.0);
  CHECK(rep1.objective_trace == rep8.objective_trace);
  CHECK(max_node_distance(r1.phi, r8.phi) == 0.0);
  CHECK(r1.ssd_trace == r8.ssd_trace);
}
