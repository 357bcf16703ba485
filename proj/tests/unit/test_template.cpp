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
#include "morphokit/template_build.hpp"

using namespace morphokit;

namespace {

constexpr double kPi = 3.14159265358979323846;

GridSpec grid2(int n, double spacing = 1.0) {
  GridSpec g;
  g.dim = 2;
  g.nx = g.ny = n;
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

TEST_CASE("a cohort of identical images is a bitwise fixed point") {
  GridSpec g = grid2(33);
  Image img = make_test_image(g, "rings", 2);
  Cohort cohort;
  cohort.images = {img, img, img};
  PassOutput po = template_pass(cohort, img, TemplateOptions{});
  CHECK(max_displacement(po.mean_map) == 0.0);
  for (const Transformation& t : po.maps) CHECK(max_displacement(t) == 0.0);
  for (std::size_t p = 0; p < img.v.size(); ++p)
    CHECK(po.next.v[p] == img.v[p]);
  // the whole pipelines inherit the fixed point
  auto [gen, grep] = build_general(cohort, 1, 2);
  for (std::size_t p = 0; p < img.v.size(); ++p) CHECK(gen.v[p] == img.v[p]);
  auto [fast, frep] = build_fast(cohort, 2);
  for (std::size_t p = 0; p < img.v.size(); ++p) CHECK(fast.v[p] == img.v[p]);
  CHECK(frep.correction_identity_gap <= 1e-15);
}

TEST_CASE("correction targets for identity maps are the trivial targets") {
  GridSpec g = grid2(17);
  std::vector<Transformation> phis(4, identity_transform(g));
  auto [f0, g0] = correction_field_targets(phis);
  for (double v : f0.v) CHECK(v == 1.0);
  for (double v : g0.v) CHECK(v == 0.0);
}

TEST_CASE("correction targets for one map are its pointwise reciprocals") {
  GridSpec g = grid2(17);
  Transformation t = smooth_warp(g, 0.4, 3);
  std::vector<Transformation> phis{t};
  auto [f0, g0] = correction_field_targets(phis);
  ScalarField j = jacobian_det(t);
  ScalarField c = curl2d(t);
  for (std::size_t p = 0; p < j.v.size(); ++p) {
    CHECK(f0.v[p] == 1.0 / j.v[p]);
    CHECK(g0.v[p] == -c.v[p]);
  }
}

TEST_CASE("correction targets are order-invariant bitwise") {
  GridSpec g = grid2(17);
  std::vector<Transformation> phis{smooth_warp(g, 0.4, 5),
                                   smooth_warp(g, 0.3, 6),
                                   smooth_warp(g, 0.5, 7)};
  auto [f0a, g0a] = correction_field_targets(phis);
  std::vector<Transformation> rev(phis.rbegin(), phis.rend());
  auto [f0b, g0b] = correction_field_targets(rev);
  for (std::size_t p = 0; p < f0a.v.size(); ++p) {
    CHECK(f0a.v[p] == f0b.v[p]);
    CHECK(g0a.v[p] == g0b.v[p]);
  }
}

TEST_CASE("correction targets reject a non-positive jacobian sum") {
  GridSpec g = grid2(9);
  Transformation flip(g);
  const double l = (g.nx - 1) * g.spacing;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      flip.comp[0].at(i, j) = l - g.coord(i);  // mirror: J = -1 everywhere
      flip.comp[1].at(i, j) = g.coord(j);
    }
  std::vector<Transformation> phis{flip};
  CHECK_THROWS_AS(correction_field_targets(phis), singular_jacobian_sum);
}

TEST_CASE("pipelines validate their inputs") {
  Cohort empty;
  CHECK_THROWS_AS(build_general(empty, 0, 1), empty_input);
  CHECK_THROWS_AS(build_fast(empty, 0), empty_input);
  GridSpec g = grid2(17);
  Cohort one;
  one.images = {make_test_image(g, "rings", 1)};
  CHECK_THROWS_AS(build_general(one, 3, 1), spec_out_of_range);
  CHECK_THROWS_AS(build_general(one, -1, 1), spec_out_of_range);
  CHECK_THROWS_AS(build_general(one, 0, 0), spec_out_of_range);
}

TEST_CASE("two-member cohort: second pass tightens, correction matches it") {
  GridSpec g = grid2(49);
  Image ref = make_test_image(g, "ramp", 11);
  std::vector<Transformation> fam = make_family6(g, 3);
  Cohort cohort;
  // one +/- shear pair, so the truth maps average to the identity
  cohort.images = {resample(ref, fam[0]), resample(ref, fam[1])};
  TemplateOptions opts;
  opts.reg.ssd_tol = 1e-5;
  auto [gen, grep] = build_general(cohort, 0, 2, &ref, opts);
  REQUIRE(grep.passes.size() == 2);
  CHECK(grep.passes[0].ssd_to_reference > 0.0);
  CHECK(grep.passes[1].ssd_to_reference < grep.passes[0].ssd_to_reference);
  CHECK(grep.passes[0].error_ratio > 0.0);
  // fan-out bookkeeping: one registration per cohort member, each accepted
  REQUIRE(grep.passes[0].registrations.size() == 2);
  CHECK(grep.passes[0].registrations[0].target == 0);
  CHECK(grep.passes[0].registrations[1].target == 1);

  auto [fast, frep] = build_fast(cohort, 0, &ref, opts);
  REQUIRE(frep.passes.size() == 1);
  CHECK(frep.correction_solve.has_value());
  CHECK(frep.correction_registrations.size() == 2);
  CHECK(frep.correction_identity_gap <= 1e-15);
  // the corrected template beats the biased pass-1 template
  CHECK(ssd(fast, ref) < frep.passes[0].ssd_to_reference);
}
