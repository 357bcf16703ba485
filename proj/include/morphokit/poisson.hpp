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

#ifndef MORPHOKIT_POISSON_HPP
#define MORPHOKIT_POISSON_HPP

#include "morphokit/grid.hpp"

namespace morphokit {

/// Dirichlet Poisson solver on the node grid, 5-point (2D) or 7-point (3D)
/// stencil:  (sum of neighbors - 2*dim*w) / h^2 = F  at interior nodes,
/// w = boundary data on the boundary.
///
/// `spectral` solves the interior system directly with type-I discrete sine
/// transforms (the stencil's eigenbasis); boundary values are folded into the
/// interior right-hand side first. Cost O(n log n), residual at rounding
/// level.
///
/// `iterative` is red-black SOR with the optimal relaxation factor for the
/// largest axis; it serves as an independent cross-check of the spectral
/// path and stops when the relative residual drops below `tol`.
struct PoissonOptions {
  enum class Method { spectral, iterative };
  Method method = Method::spectral;
  double tol = 1e-10;   // iterative only: relative residual target
  int max_iter = 50000; // iterative only: sweep cap
};

/// Solves for w with the given interior right-hand side and Dirichlet data.
/// `boundary` supplies w on boundary nodes (its interior values are ignored).
/// Throws convergence_failure when the iterative method hits max_iter.
ScalarField solve_dirichlet(const ScalarField& rhs, const ScalarField& boundary,
                            const PoissonOptions& opts = {});

/// Component-wise solve: returns the map T with Delta T = F at interior nodes
/// and T = `boundary` on the grid boundary.
Transformation solve_vector(const VectorField& rhs, const Transformation& boundary,
                            const PoissonOptions& opts = {});

/// Residual max-norm ||Delta w - F|| over interior nodes divided by
/// max(||F||, 1). Diagnostic used by tests.
double poisson_residual(const ScalarField& w, const ScalarField& rhs);

}  // namespace morphokit

#endif
