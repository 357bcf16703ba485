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

#ifndef MORPHOKIT_TEMPLATE_BUILD_HPP
#define MORPHOKIT_TEMPLATE_BUILD_HPP

#include <optional>
#include <string>
#include <vector>

#include "morphokit/grid.hpp"
#include "morphokit/registration.hpp"
#include "morphokit/varcon.hpp"

namespace morphokit {

struct Cohort {
  std::vector<Image> images;
  std::vector<std::string> labels; // empty or one per image
};

/// One registration of the fan-out, as reported.
struct RegistrationSummary {
  int target = 0;                 // cohort index registered against
  std::vector<double> ssd_trace;
  double min_jacobian = 0.0;
  RegTermination termination = RegTermination::converged;
};

struct PassReport {
  std::vector<RegistrationSummary> registrations; // one per cohort image
  SolverReport averaging;                          // the mean-map solve
  double ssd_to_reference = -1.0;  // template vs reference, -1 without one
  double error_ratio = -1.0;       // ssd_to_reference / ssd(start image, reference)
};

struct TemplateRunReport {
  int init_index = 0;
  std::vector<PassReport> passes;
  // fast pipeline only: the correction fan-out and solve
  std::vector<RegistrationSummary> correction_registrations;
  std::optional<SolverReport> correction_solve;
  double correction_identity_gap = 0.0; // max |N/sum - 1/mean| over nodes
};

struct TemplateOptions {
  RegistrationOptions reg;
  DescentOptions descent;
  PoissonOptions poisson;
  // 0 keeps continuous intensities; 256 re-rounds every resampled template
  // to 8-bit levels, matching cohorts that come from gray-level image files
  int quantize_levels = 0;
};

/// One averaging pass: register `current` to every cohort image (the current
/// template to itself is a fixed point and stays in the fan-out), average the
/// resulting maps, resample `current` through the mean map.
struct PassOutput {
  Image next;
  Transformation mean_map;
  std::vector<Transformation> maps;
  PassReport report;
};
PassOutput template_pass(const Cohort& cohort, const Image& current,
                         const TemplateOptions& opts);

/// Iterated averaging passes starting from cohort.images[init_index]. Each
/// pass composes its mean map onto the running map and resamples the init
/// image through the composition once (no resample-of-resample smoothing).
/// `reference` (when given) only feeds the report's error columns.
std::pair<Image, TemplateRunReport> build_general(
    const Cohort& cohort, int init_index, int passes,
    const Image* reference = nullptr, const TemplateOptions& opts = {});

/// Unnormalized correction targets from the template-to-image fan-out maps:
/// f0_raw = N / sum_j J(phi_j) per node (throws singular_jacobian_sum when a
/// sum is not positive), g0 = -(sum_j curl(phi_j)) / N. Sums are sorted
/// before accumulation, so the targets are order-invariant bitwise.
std::pair<ScalarField, ScalarField> correction_field_targets(
    std::span<const Transformation> phis);

/// One pass, then a correction: register the pass-1 template to every image,
/// build the correction targets, solve for the correction map H from the
/// identity, and resample the init image through the pass-1 mean map composed
/// with the inverse of H. (H's targets make the corrected fan-out maps
/// average to J = 1 and curl = 0, i.e. H absorbs the residual bias of the
/// temporary template, so the unbiased output applies its inverse.)
std::pair<Image, TemplateRunReport> build_fast(
    const Cohort& cohort, int init_index, const Image* reference = nullptr,
    const TemplateOptions& opts = {});

}  // namespace morphokit

#endif
