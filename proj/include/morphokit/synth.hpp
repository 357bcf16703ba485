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

#ifndef MORPHOKIT_SYNTH_HPP
#define MORPHOKIT_SYNTH_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "morphokit/grid.hpp"

namespace morphokit {

/// Tapered in-place rotation: inside `radius` of `center` points rotate by
/// angle(r) = max_angle * smoothstep(1 - r/radius)^taper_power; outside they
/// stay put. smoothstep is 3t^2 - 2t^3, so the angle and its slope vanish at
/// the support edge and the slope also vanishes at the center.
struct RotationalSpec {
  std::array<double, 2> center{0.0, 0.0};
  double max_angle = 0.038;  // radians, sign = direction
  double radius = 1.0;       // support radius, must fit inside the domain
  double taper_power = 1.0;
};

/// Centered spec with radius 0.45 * min extent and the default pair angle.
RotationalSpec default_rotational_spec(const GridSpec& g);

/// An opposite pair on the same grid: D1 = x + u with u the tapered-rotation
/// displacement, D2 = x - u. The lattice curl is linear in the displacement,
/// so the two curls cancel to rounding at every node. D1 twists circles in
/// place and keeps J at 1; D2 is not a rotation, its J is
/// 1 + 4(1 - cos angle(r)) + 2 angle'(r) sin(angle(r)) r, peaking at the
/// center. The 0.038 default keeps that peak just under 1.003. Throws
/// spec_out_of_range if the support leaks out of the domain or the angle is
/// too large to keep both maps invertible.
std::pair<Transformation, Transformation> make_rotational_pair(
    const GridSpec& g, const RotationalSpec& spec);

/// Six boundary-pinned maps in three +/- pairs of tapered single-axis shears
/// (two x-axis pairs, one y-axis), amplitudes seeded in [3.0h, 4.6h]. Each
/// pair's displacements are exact negations and single-axis shears carry no
/// quadratic Jacobian term, so the six Jacobians average to 1 up to rounding
/// at every node while every member moves nodes by at least 2h. Needs at
/// least 48 nodes per axis: below that the fixed-in-h amplitudes would push
/// min J under the 0.5 floor the family guarantees.
std::vector<Transformation> make_family6(const GridSpec& g, std::uint64_t seed);

/// Smooth synthetic test images with values in [0,1] and gradients almost
/// everywhere. Kinds: "rings" (radial sine), "blobs" (seeded Gaussian mix),
/// "checker" (product of sines), "broad" (Gaussian mix with sigmas a third
/// of the domain, smooth enough that one bilinear resample shifts values by
/// under half an 8-bit gray level), "ramp" (dominant linear ramp plus three
/// half-domain-wide bumps; nowhere-flat gradient and near-exact bilinear
/// resampling, the cohort scene for the template experiments).
Image make_test_image(const GridSpec& g, const std::string& kind,
                      std::uint64_t seed);

struct TwistedVolume {
  Image source;                      // n^3 volume
  Image twisted;                     // slice i of source rotated by beta_i
  std::vector<Transformation> slice_maps; // ground truth, one 2D map per slice
  Transformation volume_map;         // the same truth as one 3D map (z fixed)
};

/// Procedural rotationally-asymmetric solid (an ellipsoidal body with a spout
/// lobe and a handle ring over a faint radial texture), plus a twisted copy:
/// slice i is resampled through a tapered rotation of angle
/// twist_max * sin(pi i/(n-1)), so the twist vanishes on the z-faces.
/// slice_maps[i] is the map phi with twisted(phi(x)) ~ source(x) on slice i.
TwistedVolume make_twisted_volume(int n, double twist_max, double spacing = 1.0);

}  // namespace morphokit

#endif
