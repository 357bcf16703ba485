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
#include "morphokit/registration.hpp"
#include "morphokit/synth.hpp"

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
  const double cx = u(rng), cy = u(rng), cz = u(rng);
  Transformation t = identity_transform(g);
  const double lx = (g.nx - 1) * g.spacing, ly = (g.ny - 1) * g.spacing;
  const double lz = (g.dim == 3) ? (g.nz - 1) * g.spacing : 1.0;
  const int nz = (g.dim == 3) ? g.nz : 1;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        double s = std::sin(kPi * g.coord(i) / lx) *
                   std::sin(kPi * g.coord(j) / ly);
        if (g.dim == 3) s *= std::sin(kPi * g.coord(k) / lz);
        t.comp[0].at(i, j, k) += amp * cx * s;
        t.comp[1].at(i, j, k) += amp * cy * s;
        if (g.dim == 3) t.comp[2].at(i, j, k) += amp * cz * s;
      }
  return t;
}

Image random_image(const GridSpec& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Image img(g);
  for (double& v : img.v) v = u(rng);
  return img;
}

bool strictly_decreasing(const std::vector<double>& t) {
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] < t[i - 1])) return false;
  return true;
}

}  // namespace

TEST_CASE("ssd gradient matches central finite differences") {
  // the acceptance suite runs ten seeds; two here keep the build quick
  for (std::uint64_t seed : {5u, 6u}) {
    GridSpec g = grid2(9, 9, 1.0);
    Image moving = random_image(g, seed);
    Image fixed = random_image(g, seed + 50);
    // off-lattice map: the interpolant is smooth at every mapped point
    Transformation phi = smooth_warp(g, 0.4, seed + 100);
    VectorField grad = ssd_gradient(moving, fixed, phi);
    const double eps = 1e-6;
    double worst = 0.0, gmax = 0.0;
    for (int c = 0; c < 2; ++c)
      for (int j = 1; j < g.ny - 1; ++j)
        for (int i = 1; i < g.nx - 1; ++i) {
          Transformation pp = phi, pm = phi;
          pp.comp[static_cast<std::size_t>(c)].at(i, j) += eps;
          pm.comp[static_cast<std::size_t>(c)].at(i, j) -= eps;
          const double fd = (ssd(resample(moving, pp), fixed) -
                             ssd(resample(moving, pm), fixed)) /
                            (2 * eps);
          const double an = grad.comp[static_cast<std::size_t>(c)].at(i, j);
          worst = std::max(worst, std::abs(fd - an));
          gmax = std::max(gmax, std::abs(an));
        }
    CHECK(worst / std::max(gmax, 1e-30) < 1e-5);
    for (int c = 0; c < 2; ++c)
      for (int i = 0; i < g.nx; ++i) {
        CHECK(grad.comp[static_cast<std::size_t>(c)].at(i, 0) == 0.0);
        CHECK(grad.comp[static_cast<std::size_t>(c)].at(i, g.ny - 1) == 0.0);
      }
  }
}

TEST_CASE("registering an image to itself is a fixed point") {
  GridSpec g = grid2(17, 17);
  Image img = make_test_image(g, "rings", 1);
  RegistrationResult r = register_images(img, img);
  CHECK(r.termination == RegTermination::converged);
  CHECK(r.ssd_trace.front() == 0.0);
  CHECK(max_node_distance(r.phi, identity_transform(g)) == 0.0);
}

TEST_CASE("constant images are reported as degenerate") {
  GridSpec g = grid2(17, 17);
  Image a(g, 0.5), b(g, 0.5);
  RegistrationResult r = register_images(a, b);
  CHECK(r.termination == RegTermination::degenerate);
  CHECK(!r.note.empty());
}

TEST_CASE("registration recovers a smooth 2D warp") {
  GridSpec g = grid2(33, 33, 1.0);
  Image fixed = make_test_image(g, "rings", 4);
  Transformation d = smooth_warp(g, 1.2, 7);
  Image moving = resample(fixed, d);  // moving(d^{-1}) ~ fixed
  RegistrationOptions opts;
  opts.outer_max = 400;
  RegistrationResult r = register_images(moving, fixed, opts);
  REQUIRE(r.ssd_trace.size() >= 2);
  CHECK(r.ssd_trace.back() <= 0.1 * r.ssd_trace.front());
  CHECK(strictly_decreasing(r.ssd_trace));
  CHECK(r.min_jacobian > 0.1);
  CHECK(boundary_displacement(r.phi) == 0.0);
}

TEST_CASE("warm start from the truth map stays put") {
  GridSpec g = grid2(33, 33, 1.0);
  Image fixed = make_test_image(g, "rings", 4);
  Transformation d = smooth_warp(g, 1.2, 7);
  Image moving = resample(fixed, d);
  Transformation truth = invert_transformation(d);
  RegistrationOptions opts;
  opts.outer_max = 100;
  RegistrationResult cold = register_images(moving, fixed, opts);
  RegistrationResult warm = register_images_from(moving, fixed, truth, opts);
  // starting near the optimum, the first SSD is already below the cold floor
  CHECK(warm.ssd_trace.front() <= cold.ssd_trace.front() * 0.05);
  CHECK(warm.ssd_trace.back() <= warm.ssd_trace.front());
}

TEST_CASE("coarse-to-fine levels reach the same quality") {
  GridSpec g = grid2(33, 33, 1.0);
  Image fixed = make_test_image(g, "rings", 9);
  Transformation d = smooth_warp(g, 1.0, 11);
  Image moving = resample(fixed, d);
  RegistrationOptions opts;
  opts.levels = 2;
  opts.outer_max = 300;
  RegistrationResult r = register_images(moving, fixed, opts);
  CHECK(r.phi.grid == g);
  CHECK(r.ssd_trace.back() <= 0.1 * ssd(moving, fixed));
  CHECK(r.min_jacobian > 0.1);
}

TEST_CASE("registration recovers a smooth 3D warp") {
  GridSpec g;
  g.dim = 3;
  g.nx = g.ny = g.nz = 13;
  g.spacing = 1.0;
  // radial sine volume: smooth with gradients almost everywhere
  Image fixed(g);
  const double l = (g.nx - 1) * g.spacing, c = 0.5 * l;
  for (int k = 0; k < g.nz; ++k)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const double dx = g.coord(i) - c, dy = g.coord(j) - c,
                     dz = g.coord(k) - c;
        const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
        fixed.at(i, j, k) = 0.5 + 0.45 * std::sin(2.5 * kPi * r / l);
      }
  Transformation d = smooth_warp(g, 0.9, 5);
  Image moving = resample(fixed, d);
  RegistrationOptions opts;
  opts.outer_max = 200;
  RegistrationResult r = register_images(moving, fixed, opts);
  CHECK(r.ssd_trace.back() <= 0.5 * r.ssd_trace.front());
  CHECK(r.min_jacobian > 0.1);
  CHECK(boundary_displacement(r.phi) == 0.0);
}

TEST_CASE("mismatched grids are rejected") {
  Image a(grid2(9, 9));
  Image b(grid2(9, 11));
  CHECK_THROWS_AS(register_images(a, b), grid_mismatch);
}
