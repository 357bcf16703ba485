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

#ifndef MORPHOKIT_FIELD_OPS_HPP
#define MORPHOKIT_FIELD_OPS_HPP

#include <cstdint>

#include "morphokit/grid.hpp"

namespace morphokit {

/// Partial derivative along one axis, second order everywhere:
/// central differences at interior nodes, one-sided three-point stencils
/// ((-3 f0 + 4 f1 - f2) / 2h and its mirror) on the two boundary layers.
/// Exact for fields that are affine or quadratic in the axis coordinate.
ScalarField derivative(const ScalarField& f, int axis);

/// Determinant of the Jacobian of T at every node. J(identity) == 1 exactly,
/// boundary included.
ScalarField jacobian_det(const Transformation& t);

/// Scalar curl d(T2)/dx - d(T1)/dy of a 2D map. Throws dimension_error on 3D.
ScalarField curl2d(const Transformation& t);

/// Vector curl of a 3D map. Throws dimension_error on 2D.
VectorField curl3d(const Transformation& t);

/// Sum of d(comp c)/d(axis c).
ScalarField divergence(const VectorField& f);

/// 5-point (2D) / 7-point (3D) Laplacian at interior nodes, zero on the
/// boundary rows. Used to recover a control field from a transformation.
ScalarField laplacian_interior(const ScalarField& f);

/// Bilinear / trilinear sample at a physical point, with coordinates clamped
/// to the grid box. Exact (bitwise) at node positions.
double sample_field(const ScalarField& f, double x, double y, double z = 0.0);
double sample_image(const Image& f, double x, double y, double z = 0.0);

/// Sample and the analytic gradient of the interpolant at the same point.
/// The gradient is the derivative of the clamped interpolant itself: zero in
/// a clamped direction, piecewise constant per cell in x for the bilinear
/// case, etc.
void sample_image_with_gradient(const Image& f, double x, double y, double z,
                                double* value, double* grad);

/// I(T(x)) at every node.
Image resample(const Image& img, const Transformation& t);

/// (a . b)(x) = a(b(x)), components of a interpolated at b's mapped points.
Transformation compose(const Transformation& a, const Transformation& b);

/// Node-wise fixed-point inverse: for every node position y, iterates
/// x <- x - (t(x) - y) until the residual max-norm falls under `tol` or
/// `max_iters` is spent, then stores x. Converges when the displacement of t
/// is a contraction (small deformations); the identity boundary is preserved
/// exactly. compose(t, invert_transformation(t)) is then identity up to
/// interpolation error.
Transformation invert_transformation(const Transformation& t,
                                     int max_iters = 200, double tol = 1e-13);

/// h^dim * sum over all nodes of (a-b)^2. Deterministic across thread counts.
double ssd(const Image& a, const Image& b);

/// Min of jacobian_det(t) over interior nodes.
double min_interior_jacobian(const Transformation& t);

/// Mean of a field over all nodes (deterministic reduction).
double field_mean(const ScalarField& f);

/// Rounds intensities to `levels` evenly spaced values in [0,1] (clamping
/// first), e.g. levels = 256 for 8-bit data. Throws spec_out_of_range when
/// levels < 2.
Image quantize(const Image& img, int levels);

/// Adds smooth pseudo-random noise to the displacement of t at interior
/// nodes; the boundary trace is untouched. `amplitude` bounds the max-abs of
/// the raw per-node draw (in coordinate units) before smoothing; two passes
/// of neighbor averaging smooth the draw. Same seed, same result, any thread
/// count.
Transformation add_noise(const Transformation& t, double amplitude,
                         std::uint64_t seed);

}  // namespace morphokit

#endif
