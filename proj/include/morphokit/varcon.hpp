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

#ifndef MORPHOKIT_VARCON_HPP
#define MORPHOKIT_VARCON_HPP

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "morphokit/grid.hpp"
#include "morphokit/poisson.hpp"

namespace morphokit {

/// Construct a 2D map T with prescribed Jacobian determinant f0 and scalar
/// curl g0, boundary pinned to the identity. T is parameterized through a
/// control field F with Delta T = F (interior), T = x (boundary); descent
/// happens on F, so every iterate stays a Poisson solution and the boundary
/// never moves.
struct VarConProblem {
  ScalarField f0;                    // target Jacobian, > 0, mean 1
  ScalarField g0;                    // target curl
  std::optional<Transformation> T_init; // starting map (identity when absent)
};

struct DescentOptions {
  double step = 0.05;       // initial step on the control field
  int max_steps = 10000;    // accepted-step cap
  double obj_tol = 1e-8;    // stop after 5 consecutive relative decreases below this
  double jmin_guard = 0.05; // reject steps whose min interior Jacobian dips below
  int max_halvings = 20;    // backtracking cap per step
};

enum class Termination { converged, max_steps, guard_halt };

struct SolverReport {
  std::vector<double> objective_trace; // initial value then every accepted step
  int steps_taken = 0;                 // accepted steps
  double min_jacobian = 0.0;           // over interior nodes, final iterate
  double max_jacobian = 0.0;
  double residual_jacobian = 0.0;      // h^2 * sum (J - f0)^2, interior
  double residual_curl = 0.0;          // h^2 * sum (curl - g0)^2, interior
  Termination termination = Termination::converged;
};

/// Scales f to mean 1. Throws non_positive_target unless every value > 0.
ScalarField normalize_f0(const ScalarField& f);

/// h^2 * sum over interior nodes of (J(T)-f0)^2 + (curl(T)-g0)^2.
double varcon_objective(const Transformation& t, const ScalarField& f0,
                        const ScalarField& g0);

/// Exact gradient of varcon_objective with respect to the nodal values of T.
/// Zero on boundary nodes (they are not free).
VectorField varcon_gradient_wrt_T(const Transformation& t, const ScalarField& f0,
                                  const ScalarField& g0);

/// Gradient descent on the control field: the T-gradient is pulled back
/// through the (self-adjoint) discrete Dirichlet Laplacian, the control is
/// stepped, T re-solved, and the step accepted only when the objective
/// decreases and min interior J stays above jmin_guard; otherwise the step is
/// halved (up to max_halvings, then guard_halt).
std::pair<Transformation, SolverReport> varcon_solve(
    const VarConProblem& problem, const DescentOptions& opts = {},
    const PoissonOptions& poisson = {});

/// Mean map of a family: f0 = normalized weighted mean of the members'
/// Jacobians, g0 = weighted mean of their curls, then varcon_solve from the
/// identity. Per-node means sort their N weighted terms before summing, so
/// the result is bitwise invariant under permutation of the inputs.
/// `weights` empty means uniform 1/N; otherwise weights must be positive and
/// sum to 1 (1e-12 slack).
std::pair<Transformation, SolverReport> average_transformations(
    std::span<const Transformation> ts, std::span<const double> weights = {},
    const DescentOptions& opts = {}, const PoissonOptions& poisson = {});

/// The averaging targets alone (normalized f0, g0); exposed for tests and
/// the CLI.
std::pair<ScalarField, ScalarField> averaging_targets(
    std::span<const Transformation> ts, std::span<const double> weights = {});

}  // namespace morphokit

#endif
