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

#include "morphokit/template_build.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "morphokit/field_ops.hpp"
#include "morphokit/parallel.hpp"

namespace morphokit {

namespace {

void validate_cohort(const Cohort& cohort) {
  if (cohort.images.empty()) throw empty_input("template: empty cohort");
  const GridSpec& g = cohort.images[0].grid;
  g.validate();
  if (g.dim != 2)
    throw dimension_error("template: averaging-based pipelines are 2D");
  for (const auto& img : cohort.images)
    require_same_grid(img.grid, g, "template cohort");
  if (!cohort.labels.empty() && cohort.labels.size() != cohort.images.size())
    throw spec_out_of_range("template: labels must be empty or one per image");
}

RegistrationSummary summarize(int target, const RegistrationResult& r) {
  RegistrationSummary s;
  s.target = target;
  s.ssd_trace = r.ssd_trace;
  s.min_jacobian = r.min_jacobian;
  s.termination = r.termination;
  return s;
}

}  // namespace

PassOutput template_pass(const Cohort& cohort, const Image& current,
                         const TemplateOptions& opts) {
  validate_cohort(cohort);
  require_same_grid(current.grid, cohort.images[0].grid, "template_pass");
  const int n = static_cast<int>(cohort.images.size());

  PassOutput out;
  out.maps.resize(static_cast<std::size_t>(n));
  out.report.registrations.resize(static_cast<std::size_t>(n));

  // independent registrations; results land in index order, so the fan-out
  // is deterministic no matter how it is scheduled
#pragma omp parallel for schedule(dynamic)
  for (int j = 0; j < n; ++j) {
    RegistrationResult r =
        register_images(current, cohort.images[j], opts.reg, opts.poisson);
    out.report.registrations[j] = summarize(j, r);
    out.maps[j] = std::move(r.phi);
  }

  auto [mean_map, avg_report] =
      average_transformations(out.maps, {}, opts.descent, opts.poisson);
  out.mean_map = std::move(mean_map);
  out.report.averaging = std::move(avg_report);
  out.next = resample(current, out.mean_map);
  if (opts.quantize_levels >= 2)
    out.next = quantize(out.next, opts.quantize_levels);
  return out;
}

std::pair<Image, TemplateRunReport> build_general(const Cohort& cohort,
                                                  int init_index, int passes,
                                                  const Image* reference,
                                                  const TemplateOptions& opts) {
  validate_cohort(cohort);
  if (init_index < 0 || init_index >= static_cast<int>(cohort.images.size()))
    throw spec_out_of_range("build_general: init_index out of range");
  if (passes < 1) throw spec_out_of_range("build_general: passes must be >= 1");

  TemplateRunReport rep;
  rep.init_index = init_index;
  const Image& start = cohort.images[static_cast<std::size_t>(init_index)];
  Image current = start;
  const double denom = reference ? ssd(current, *reference) : -1.0;

  // every pass resamples the untouched init image through the maps composed
  // so far, so interpolation smoothing is paid once, not once per pass
  Transformation cum;
  for (int p = 0; p < passes; ++p) {
    PassOutput po = template_pass(cohort, current, opts);
    cum = (p == 0) ? std::move(po.mean_map) : compose(cum, po.mean_map);
    current = resample(start, cum);
    if (opts.quantize_levels >= 2)
      current = quantize(current, opts.quantize_levels);
    if (reference) {
      po.report.ssd_to_reference = ssd(current, *reference);
      po.report.error_ratio =
          (denom > 0.0) ? po.report.ssd_to_reference / denom : -1.0;
    }
    rep.passes.push_back(std::move(po.report));
  }
  return {std::move(current), std::move(rep)};
}

std::pair<ScalarField, ScalarField> correction_field_targets(
    std::span<const Transformation> phis) {
  if (phis.empty()) throw empty_input("correction_field_targets: no maps");
  const GridSpec& g = phis[0].grid;
  g.validate();
  if (g.dim != 2) throw dimension_error("correction_field_targets: 2D only");
  for (const auto& t : phis)
    require_same_grid(t.grid, g, "correction_field_targets");

  const std::size_t n = phis.size();
  std::vector<ScalarField> J(n), C(n);
  for (std::size_t m = 0; m < n; ++m) {
    J[m] = jacobian_det(phis[m]);
    C[m] = curl2d(phis[m]);
  }

  ScalarField f0raw(g), g0(g);
  const std::size_t nodes = g.node_count();
  std::atomic<bool> bad{false};
#pragma omp parallel
  {
    std::vector<double> terms(n);
#pragma omp for schedule(static)
    for (long long q = 0; q < static_cast<long long>(nodes); ++q) {
      for (std::size_t m = 0; m < n; ++m) terms[m] = J[m].v[q];
      std::sort(terms.begin(), terms.end());
      double s = 0.0;
      for (double x : terms) s += x;
      if (!(s > 0.0)) bad.store(true, std::memory_order_relaxed);
      f0raw.v[q] = static_cast<double>(n) / s;

      for (std::size_t m = 0; m < n; ++m) terms[m] = C[m].v[q];
      std::sort(terms.begin(), terms.end());
      s = 0.0;
      for (double x : terms) s += x;
      g0.v[q] = -s / static_cast<double>(n);
    }
  }
  if (bad.load())
    throw singular_jacobian_sum(
        "correction_field_targets: Jacobians sum to <= 0 at a node");
  return {std::move(f0raw), std::move(g0)};
}

std::pair<Image, TemplateRunReport> build_fast(const Cohort& cohort,
                                               int init_index,
                                               const Image* reference,
                                               const TemplateOptions& opts) {
  validate_cohort(cohort);
  if (init_index < 0 || init_index >= static_cast<int>(cohort.images.size()))
    throw spec_out_of_range("build_fast: init_index out of range");

  TemplateRunReport rep;
  rep.init_index = init_index;
  const Image& start = cohort.images[static_cast<std::size_t>(init_index)];
  const double denom = reference ? ssd(start, *reference) : -1.0;

  PassOutput po = template_pass(cohort, start, opts);
  Image pass1 = std::move(po.next);
  if (reference) {
    po.report.ssd_to_reference = ssd(pass1, *reference);
    po.report.error_ratio =
        (denom > 0.0) ? po.report.ssd_to_reference / denom : -1.0;
  }
  const Transformation mean1 = std::move(po.mean_map);
  rep.passes.push_back(std::move(po.report));

  // second fan-out: the pass-1 template to every cohort image
  const int n = static_cast<int>(cohort.images.size());
  std::vector<Transformation> psi(static_cast<std::size_t>(n));
  rep.correction_registrations.resize(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic)
  for (int j = 0; j < n; ++j) {
    RegistrationResult r =
        register_images(pass1, cohort.images[j], opts.reg, opts.poisson);
    rep.correction_registrations[j] = summarize(j, r);
    psi[j] = std::move(r.phi);
  }

  auto [f0raw, g0] = correction_field_targets(psi);

  // the reciprocal-of-mean form is algebraically identical; record the gap
  {
    const std::size_t nodes = f0raw.grid.node_count();
    std::vector<ScalarField> J(psi.size());
    for (std::size_t m = 0; m < psi.size(); ++m) J[m] = jacobian_det(psi[m]);
    double gap = 0.0;
#pragma omp parallel for reduction(max : gap) schedule(static)
    for (long long q = 0; q < static_cast<long long>(nodes); ++q) {
      std::vector<double> terms(psi.size());
      for (std::size_t m = 0; m < psi.size(); ++m) terms[m] = J[m].v[q];
      std::sort(terms.begin(), terms.end());
      double s = 0.0;
      for (double x : terms) s += x;
      const double mean = s / static_cast<double>(psi.size());
      gap = std::max(gap, std::fabs(f0raw.v[q] - 1.0 / mean));
    }
    rep.correction_identity_gap = gap;
  }

  VarConProblem prob;
  prob.f0 = normalize_f0(f0raw);
  prob.g0 = std::move(g0);
  auto [H, solve_rep] = varcon_solve(prob, opts.descent, opts.poisson);
  rep.correction_solve = std::move(solve_rep);

  // H carries the residual bias of the temporary template (its targets are
  // built so the corrected fan-out maps average to J = 1, curl = 0), so the
  // unbiased template comes from resampling through the inverse of H; the
  // init image goes through the one composed map to avoid double smoothing
  Image out = resample(start, compose(mean1, invert_transformation(H)));
  if (opts.quantize_levels >= 2) out = quantize(out, opts.quantize_levels);
  return {std::move(out), std::move(rep)};
}

}  // namespace morphokit
