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

#ifndef MORPHOKIT_REFERENCE_HPP
#define MORPHOKIT_REFERENCE_HPP

#include "morphokit/grid.hpp"

// Single-threaded brute-force versions of the hot kernels, written
// independently of the parallel library: plain nested loops, per-node stencil
// branches, no shared helpers. Tests use them as oracles; the benchmark
// target compares them with the parallel kernels.
namespace morphokit::reference {

ScalarField jacobian_det(const Transformation& t);
ScalarField curl2d(const Transformation& t);
VectorField curl3d(const Transformation& t);
ScalarField divergence(const VectorField& f);
Image resample(const Image& img, const Transformation& t);
Transformation compose(const Transformation& a, const Transformation& b);
double ssd(const Image& a, const Image& b);

}  // namespace morphokit::reference

#endif
