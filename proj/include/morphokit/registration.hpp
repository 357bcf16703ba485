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

#ifndef MORPHOKIT_REGISTRATION_HPP
#define MORPHOKIT_REGISTRATION_HPP

#include <string>
#include <vector>

#include "morphokit/grid.hpp"
#include "morphokit/poisson.hpp"

namespace morphokit {

struct RegistrationOptions {
  double step = 1.0;        // initial step on the update control field
  int outer_max = 2000;     // accepted outer steps cap
  int inner_steps = 1;      // gradient steps per composition point
  double ssd_tol = 1e-7;    // stop after 5 consecutive relative decreases below this
  double jmin_guard = 0.1;  // reject updates whose composed map dips below
  int max_halvings = 20;
  int levels = 1;           // >1: coarse-to-fine on odd-sized grids
};

enum class RegTermination { converged, max_steps, step_exhausted, degenerate };

struct RegistrationResult {
  Transformation phi;           // I_moving(phi(x)) ~ I_fixed(x); identity boundary
  std::vector<double> ssd_trace; // initial SSD then every accepted step
  double min_jacobian = 0.0;    // interior, final map
  RegTermination termination = RegTermination::converged;
  std::string note;             // set for degenerate inputs
};

/// Exact gradient of ssd(resample(moving, phi), fixed) with respect to the
/// nodal values of phi: 2 h^dim (I_m(phi(x)) - I_f(x)) * grad of the
/// interpolant of I_m at phi(x), zero on boundary nodes.
VectorField ssd_gradient(const Image& moving, const Image& fixed,
                         const Transformation& phi);

/// Non-rigid registration by descent on a per-step update control field:
/// each outer step smooths the SSD gradient through the Dirichlet Laplacian,
/// moves by u = -step * (-Delta)^{-1} grad (zero on the boundary), composes
/// phi <- phi(x + u), and keeps the update only when the SSD drops and min
/// interior J(phi) stays above jmin_guard. Works on 2D images and 3D volumes
/// alike.
RegistrationResult register_images(const Image& moving, const Image& fixed,
                                   const RegistrationOptions& opts = {},
                                   const PoissonOptions& poisson = {});

/// Same, but starting from a given map instead of the identity.
RegistrationResult register_images_from(const Image& moving, const Image& fixed,
                                        const Transformation& phi0,
                                        const RegistrationOptions& opts = {},
                                        const PoissonOptions& poisson = {});

}  // namespace morphokit

#endif
