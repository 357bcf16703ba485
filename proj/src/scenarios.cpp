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

#include "morphokit/scenarios.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "morphokit/field_ops.hpp"
#include "morphokit/render.hpp"

namespace morphokit::scenarios {

namespace {

using clock_type = std::chrono::steady_clock;

double elapsed_seconds(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

GridSpec square_grid(int n) {
  GridSpec g;
  g.dim = 2;
  g.nx = g.ny = n;
  g.spacing = 1.0;
  return g;
}

bool strictly_decreasing(std::span<const double> xs) {
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] < xs[i - 1])) return false;
  return true;
}

}  // namespace

double sample_std(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

CohortScenario make_cohort_scenario(const GridSpec& g,
                                    std::uint64_t family_seed,
                                    std::uint64_t image_seed) {
  CohortScenario cs;
  cs.reference = make_test_image(g, "ramp", image_seed);
  cs.truth_maps = make_family6(g, family_seed);
  cs.cohort.images.reserve(cs.truth_maps.size());
  for (std::size_t i = 0; i < cs.truth_maps.size(); ++i) {
    cs.cohort.images.push_back(resample(cs.reference, cs.truth_maps[i]));
    cs.cohort.labels.push_back("I" + std::to_string(i + 1));
  }
  return cs;
}

TemplateOptions template_scenario_options() {
  TemplateOptions opts;
  opts.reg.ssd_tol = kPipelineRegTol;
  return opts;
}

Example1Result run_example1() {
  const auto t0 = clock_type::now();
  const GridSpec g = square_grid(kPairGridN);
  const auto [d1, d2] = make_rotational_pair(g, default_rotational_spec(g));

  Example1Result r;
  const TransformStats s1 = transform_stats(d1);
  const TransformStats s2 = transform_stats(d2);
  r.min_j_d1 = s1.min_jacobian;
  r.max_j_d1 = s1.max_jacobian;
  r.min_j_d2 = s2.min_jacobian;
  r.max_j_d2 = s2.max_jacobian;

  const ScalarField c1 = curl2d(d1);
  const ScalarField c2 = curl2d(d2);
  double worst = 0.0;
#pragma omp parallel for reduction(max : worst) schedule(static)
  for (long long q = 0; q < static_cast<long long>(c1.size()); ++q)
    worst = std::max(worst, std::fabs(c1.v[q] + c2.v[q]));
  r.max_curl_cancellation = worst;

  const Image img = make_test_image(g, "blobs", kPairImageSeed);
  r.image_ssd = ssd(resample(img, d1), resample(img, d2));
  r.seconds = elapsed_seconds(t0);
  return r;
}

Example2Result run_example2(bool noisy) {
  const auto t0 = clock_type::now();
  const GridSpec g = square_grid(kVarconGridN);
  RotationalSpec spec = default_rotational_spec(g);
  spec.max_angle = kVarconPairAngle;
  const auto [d1, d2] = make_rotational_pair(g, spec);

  VarConProblem problem;
  problem.f0 = normalize_f0(jacobian_det(d2));
  problem.g0 = curl2d(d2);
  problem.T_init = noisy ? add_noise(d1, kNoiseAmplitude, kNoiseSeed) : d1;

  Example2Result r;
  r.initial_distance = max_node_distance(*problem.T_init, d2) / g.spacing;

  DescentOptions opts;
  auto [T, rep] = varcon_solve(problem, opts);
  r.max_node_error = max_node_distance(T, d2) / g.spacing;
  r.trace_strictly_decreasing = strictly_decreasing(rep.objective_trace);
  r.result = std::move(T);
  r.report = std::move(rep);
  r.seconds = elapsed_seconds(t0);
  return r;
}

Example3Result run_example3() {
  const auto t0 = clock_type::now();
  const GridSpec g = square_grid(kTemplateGridN);
  const CohortScenario cs =
      make_cohort_scenario(g, kFamilySeed, kCohortImageSeed);
  const TemplateOptions opts = template_scenario_options();

  Example3Result r;
  const int n = static_cast<int>(cs.cohort.images.size());
  for (int init = 0; init < n; ++init) {
    auto [tmpl, rep] = build_general(cs.cohort, init, 2, &cs.reference, opts);
    r.pass1_ratios.push_back(rep.passes[0].error_ratio);
    r.pass2_ratios.push_back(rep.passes[1].error_ratio);
    r.pass1_ssd.push_back(rep.passes[0].ssd_to_reference);
    r.pass2_ssd.push_back(rep.passes[1].ssd_to_reference);

    // verification runs at full registration quality, not the pipeline budget
    RegistrationResult verify = register_images(tmpl, cs.reference);
    const TransformStats st = transform_stats(verify.phi);
    r.verify_min_j.push_back(st.min_jacobian);
    r.verify_max_abs_curl.push_back(
        std::max(std::fabs(st.min_curl), std::fabs(st.max_curl)));
  }
  r.pass1_std = sample_std(r.pass1_ssd);
  r.pass2_std = sample_std(r.pass2_ssd);
  r.seconds = elapsed_seconds(t0);
  return r;
}

Example4Result run_example4() {
  const auto t0 = clock_type::now();
  const GridSpec g = square_grid(kTemplateGridN);
  const CohortScenario cs =
      make_cohort_scenario(g, kFamilySeed, kCohortImageSeed);
  const TemplateOptions opts = template_scenario_options();

  Example4Result r;
  const int n = static_cast<int>(cs.cohort.images.size());
  for (int init = 0; init < n; ++init) {
    auto [tmpl, rep] = build_fast(cs.cohort, init, &cs.reference, opts);
    r.pass1_ratios.push_back(rep.passes[0].error_ratio);
    const double denom = ssd(cs.cohort.images[init], cs.reference);
    const double num = ssd(tmpl, cs.reference);
    r.corrected_ssd.push_back(num);
    r.corrected_ratios.push_back(num / denom);
    r.max_identity_gap =
        std::max(r.max_identity_gap, rep.correction_identity_gap);
  }
  r.seconds = elapsed_seconds(t0);
  return r;
}

Example5Result run_example5() {
  const auto t0 = clock_type::now();
  const TwistedVolume tv = make_twisted_volume(kTwistGridN, kTwistMax);

  RegistrationOptions opts;
  opts.outer_max = 4000;
  RegistrationResult reg = register_images(tv.twisted, tv.source, opts);

  Example5Result r;
  r.initial_ssd = reg.ssd_trace.front();
  r.final_ssd = reg.ssd_trace.back();
  r.max_node_error =
      max_node_distance(reg.phi, tv.volume_map) / tv.source.grid.spacing;
  r.min_jacobian = reg.min_jacobian;
  r.seconds = elapsed_seconds(t0);
  return r;
}

Registration2dResult run_registration2d() {
  const auto t0 = clock_type::now();
  const GridSpec g = square_grid(kVarconGridN);
  RotationalSpec spec = default_rotational_spec(g);
  spec.max_angle = kVarconPairAngle;
  const auto [d1, d2] = make_rotational_pair(g, spec);
  const Image fixed = make_test_image(g, "blobs", kReg2dImageSeed);
  const Image moving = resample(fixed, d1);

  RegistrationOptions opts;
  RegistrationResult reg = register_images(moving, fixed, opts);

  Registration2dResult r;
  r.initial_ssd = reg.ssd_trace.front();
  r.final_ssd = reg.ssd_trace.back();
  r.min_jacobian = reg.min_jacobian;
  r.trace_monotone = strictly_decreasing(reg.ssd_trace);
  r.seconds = elapsed_seconds(t0);
  return r;
}

}  // namespace morphokit::scenarios
