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

#ifndef MORPHOKIT_RENDER_HPP
#define MORPHOKIT_RENDER_HPP

#include <string>

#include "morphokit/grid.hpp"

namespace morphokit {

/// Deformed-grid picture of a 2D map: every stride-th grid line (plus the last
/// one) is drawn as a polyline through the mapped node positions, black on
/// white, anti-aliased. Deterministic: same inputs, byte-identical image.
Image render_grid(const Transformation& t, int stride = 4);

struct TransformStats {
  int dim = 2;
  double min_jacobian = 0.0;   // over all nodes
  double max_jacobian = 0.0;
  double mean_jacobian = 0.0;
  double min_curl = 0.0;       // 2D: signed curl; 3D: Euclidean curl norm
  double max_curl = 0.0;
  double mean_curl = 0.0;
  double max_displacement = 0.0;
  double boundary_displacement = 0.0;
};

TransformStats transform_stats(const Transformation& t);

/// JSON text for a stats block (used by the CLI and run reports).
std::string stats_json(const TransformStats& s);

}  // namespace morphokit

#endif
