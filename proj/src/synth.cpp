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

#include "morphokit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "morphokit/field_ops.hpp"

namespace morphokit {

namespace {

constexpr double kMaxPairAngle = 0.4; // beyond this the opposite map can fold

double smoothstep(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * (3.0 - 2.0 * t);
}

double taper_angle(const RotationalSpec& spec, double r) {
  if (r >= spec.radius) return 0.0;
  double s = smoothstep(1.0 - r / spec.radius);
  if (spec.taper_power != 1.0) s = std::pow(s, spec.taper_power);
  return spec.max_angle * s;
}

double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
}

}  // namespace

RotationalSpec default_rotational_spec(const GridSpec& g) {
  g.validate();
  RotationalSpec s;
  s.center = {g.coord(g.nx - 1) / 2.0, g.coord(g.ny - 1) / 2.0};
  s.radius = 0.45 * std::min(g.coord(g.nx - 1), g.coord(g.ny - 1));
  s.max_angle = 0.038;
  return s;
}

std::pair<Transformation, Transformation> make_rotational_pair(
    const GridSpec& g, const RotationalSpec& spec) {
  g.validate();
  if (g.dim != 2) throw dimension_error("make_rotational_pair: 2D only");
  if (!(spec.radius > 0.0))
    throw spec_out_of_range("make_rotational_pair: radius must be positive");
  if (std::fabs(spec.max_angle) > kMaxPairAngle)
    throw spec_out_of_range("make_rotational_pair: |max_angle| too large");
  if (!(spec.taper_power > 0.0))
    throw spec_out_of_range("make_rotational_pair: taper_power must be positive");
  const double lx = g.coord(g.nx - 1), ly = g.coord(g.ny - 1);
  const double eps = 1e-9 * g.spacing;
  if (spec.center[0] - spec.radius < -eps || spec.center[0] + spec.radius > lx + eps ||
      spec.center[1] - spec.radius < -eps || spec.center[1] + spec.radius > ly + eps)
    throw spec_out_of_range("make_rotational_pair: support leaves the domain");

  Transformation d1(g), d2(g);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t q = g.index(i, j);
      const double x = g.coord(i), y = g.coord(j);
      const double dx = x - spec.center[0], dy = y - spec.center[1];
      const double r = std::hypot(dx, dy);
      const double th = taper_angle(spec, r);
      const double c = std::cos(th), s = std::sin(th);
      // u = R(theta)(x-c) - (x-c); the opposite map subtracts the same u
      const double ux = (c - 1.0) * dx - s * dy;
      const double uy = s * dx + (c - 1.0) * dy;
      d1.comp[0].v[q] = x + ux;
      d1.comp[1].v[q] = y + uy;
      d2.comp[0].v[q] = x - ux;
      d2.comp[1].v[q] = y - uy;
    }
  if (!(min_interior_jacobian(d1) > 0.0) || !(min_interior_jacobian(d2) > 0.0))
    throw spec_out_of_range("make_rotational_pair: angle folds the grid");
  d1.diffeomorphic = true;
  d2.diffeomorphic = true;
  return {std::move(d1), std::move(d2)};
}

std::vector<Transformation> make_family6(const GridSpec& g, std::uint64_t seed) {
  g.validate();
  if (g.dim != 2) throw dimension_error("make_family6: 2D only");
  if (std::min(g.nx, g.ny) < 48)
    throw spec_out_of_range("make_family6: need at least 48 nodes per axis");
  std::mt19937_64 rng(seed);
  const double lx = g.coord(g.nx - 1), ly = g.coord(g.ny - 1);
  const double h = g.spacing;

  std::vector<Transformation> out;
  out.reserve(6);
  for (int pair = 0; pair < 3; ++pair) {
    // tapered single-axis shear: axis 0 pairs move x by f(y) g(x), the axis 1
    // pair moves y by f(x) g(y); J is 1 + f * (dg along the moved axis), so a
    // +/- pair's Jacobians average to 1 up to rounding at every node
    const int axis = (pair == 2) ? 1 : 0;
    const double amp = (3.0 + 1.6 * (0.5 + 0.5 * unit_draw(rng))) * h;
    const double mod = 0.15 + 0.1 * (0.5 + 0.5 * unit_draw(rng));
    const double phase = M_PI * unit_draw(rng);
    const double lm = (axis == 0) ? ly : lx; // axis of the profile f
    const double lg = (axis == 0) ? lx : ly; // axis of the bump g

    Transformation dp = identity_transform(g);
    Transformation dm = identity_transform(g);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const std::size_t q = g.index(i, j);
        const double x = g.coord(i), y = g.coord(j);
        const double pf = (axis == 0) ? y : x;
        const double pg = (axis == 0) ? x : y;
        const double sf = std::sin(M_PI * pf / lm);
        const double f =
            amp * sf * sf * (1.0 + mod * std::sin(2.0 * M_PI * pf / lm + phase));
        const double u = f * std::sin(M_PI * pg / lg);
        dp.comp[axis].v[q] += u;
        dm.comp[axis].v[q] -= u;
      }
    dp.diffeomorphic = min_interior_jacobian(dp) > 0.0;
    dm.diffeomorphic = min_interior_jacobian(dm) > 0.0;
    out.push_back(std::move(dp));
    out.push_back(std::move(dm));
  }
  return out;
}

Image make_test_image(const GridSpec& g, const std::string& kind,
                      std::uint64_t seed) {
  g.validate();
  if (g.dim != 2) throw dimension_error("make_test_image: 2D only");
  std::mt19937_64 rng(seed);
  const double lx = g.coord(g.nx - 1), ly = g.coord(g.ny - 1);
  const double l = std::min(lx, ly);
  Image img(g);

  if (kind == "rings") {
    const double cx = lx / 2.0 + 0.05 * l * unit_draw(rng);
    const double cy = ly / 2.0 + 0.05 * l * unit_draw(rng);
    const double period = l / 5.5;
    const double phase = M_PI * unit_draw(rng);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const double r = std::hypot(g.coord(i) - cx, g.coord(j) - cy);
        img.v[g.index(i, j)] =
            0.5 + 0.5 * std::sin(2.0 * M_PI * r / period + phase);
      }
    return img;
  }

  if (kind == "checker") {
    const double period = l / 4.0;
    const double phase = M_PI * unit_draw(rng);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        img.v[g.index(i, j)] =
            0.5 + 0.5 * std::sin(2.0 * M_PI * g.coord(i) / period + phase) *
                      std::sin(2.0 * M_PI * g.coord(j) / period + phase);
    return img;
  }

  if (kind == "blobs" || kind == "broad") {
    // "broad" widens the mixture so the image curvature stays far below the
    // bilinear interpolation scale: one resample then moves every intensity
    // by well under half an 8-bit gray level
    const bool broad = kind == "broad";
    const int nblobs = broad ? 6 : 10;
    const double sg_lo = broad ? 0.30 : 0.08;
    const double sg_span = broad ? 0.15 : 0.12;
    std::vector<double> cx(nblobs), cy(nblobs), sg(nblobs), am(nblobs);
    for (int b = 0; b < nblobs; ++b) {
      cx[b] = lx * (0.15 + 0.7 * (0.5 + 0.5 * unit_draw(rng)));
      cy[b] = ly * (0.15 + 0.7 * (0.5 + 0.5 * unit_draw(rng)));
      sg[b] = l * (sg_lo + sg_span * (0.5 + 0.5 * unit_draw(rng)));
      am[b] = unit_draw(rng);
    }
#pragma omp parallel for schedule(static)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        double v = 0.0;
        for (int b = 0; b < nblobs; ++b) {
          const double dx = g.coord(i) - cx[b], dy = g.coord(j) - cy[b];
          v += am[b] * std::exp(-(dx * dx + dy * dy) / (2.0 * sg[b] * sg[b]));
        }
        img.v[g.index(i, j)] = v;
      }
    double mn = img.v[0], mx = img.v[0];
    for (double v : img.v) {
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
    const double scale = (mx > mn) ? 0.96 / (mx - mn) : 0.0;
#pragma omp parallel for schedule(static)
    for (long long q = 0; q < static_cast<long long>(img.size()); ++q)
      img.v[q] = 0.02 + (img.v[q] - mn) * scale;
    return img;
  }

  if (kind == "ramp") {
    // a dominant linear ramp plus three very wide bumps: the gradient is
    // bounded away from zero everywhere (no flat plateaus for registration
    // to wander on) and the curvature is low enough that one bilinear
    // resample is nearly exact
    const int nb = 3;
    std::vector<double> cx(nb), cy(nb), sg(nb), am(nb);
    for (int b = 0; b < nb; ++b) {
      cx[b] = lx * (0.2 + 0.6 * (0.5 + 0.5 * unit_draw(rng)));
      cy[b] = ly * (0.2 + 0.6 * (0.5 + 0.5 * unit_draw(rng)));
      sg[b] = l * (0.50 + 0.12 * (0.5 + 0.5 * unit_draw(rng)));
      am[b] = (unit_draw(rng) >= 0.0) ? 0.045 : -0.045;
    }
#pragma omp parallel for schedule(static)
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const double x = g.coord(i), y = g.coord(j);
        double v = 0.55 * x / lx + 0.33 * y / ly;
        for (int b = 0; b < nb; ++b) {
          const double dx = x - cx[b], dy = y - cy[b];
          v += am[b] * std::exp(-(dx * dx + dy * dy) / (2.0 * sg[b] * sg[b]));
        }
        img.v[g.index(i, j)] = v;
      }
    double mn = img.v[0], mx = img.v[0];
    for (double v : img.v) {
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
    const double scale = (mx > mn) ? 0.96 / (mx - mn) : 0.0;
#pragma omp parallel for schedule(static)
    for (long long q = 0; q < static_cast<long long>(img.size()); ++q)
      img.v[q] = 0.02 + (img.v[q] - mn) * scale;
    return img;
  }

  throw spec_out_of_range("make_test_image: unknown kind '" + kind + "'");
}

namespace {

struct SceneParams {
  double cx, cy, l;
};

double soft_disc(double d, double w) {
  // 1 inside (d < 0), 0 outside, smooth over width w
  return smoothstep(0.5 - d / w);
}

// Rotationally asymmetric slice scene: ellipse body, spout lobe on +x,
// handle ring on -x, cap blob on +y, over a faint radial texture. The
// texture phase sweeps with z so axial position is anchored even though the
// shapes rotate from slice to slice.
double scene_value(const SceneParams& p, double zfrac, double px, double py) {
  const double dx = px - p.cx, dy = py - p.cy;
  const double r = std::hypot(dx, dy);
  double v = 0.2 + 0.12 * std::sin(2.0 * M_PI * r / (p.l / 5.0) +
                                   2.5 * M_PI * zfrac);

  const double squeeze = 0.8 + 0.2 * std::sin(M_PI * zfrac);
  const double ba = 0.30 * p.l * squeeze, bb = 0.20 * p.l * squeeze;
  const double rho = std::hypot(dx / ba, dy / bb);
  v += 0.4 * soft_disc((rho - 1.0) * std::min(ba, bb), 0.08 * p.l);

  const double sx = p.cx + 0.36 * p.l, sy = p.cy;
  v += 0.25 * soft_disc(std::hypot(px - sx, py - sy) - 0.09 * p.l, 0.05 * p.l);

  const double hx = p.cx - 0.34 * p.l, hy = p.cy;
  const double ring = std::fabs(std::hypot(px - hx, py - hy) - 0.10 * p.l);
  v += 0.3 * soft_disc(ring - 0.025 * p.l, 0.04 * p.l);

  const double tx = p.cx, ty = p.cy + 0.28 * p.l;
  v += 0.2 * soft_disc(std::hypot(px - tx, py - ty) - 0.05 * p.l, 0.04 * p.l);

  return std::clamp(v, 0.0, 1.0);
}

}  // namespace

TwistedVolume make_twisted_volume(int n, double twist_max, double spacing) {
  if (n < 16)
    throw spec_out_of_range("make_twisted_volume: need n >= 16");
  if (std::fabs(twist_max) > kMaxPairAngle)
    throw spec_out_of_range("make_twisted_volume: |twist_max| too large");
  GridSpec g3;
  g3.dim = 3;
  g3.nx = g3.ny = g3.nz = n;
  g3.spacing = spacing;
  g3.validate();

  GridSpec g2 = g3;
  g2.dim = 2;
  g2.nz = 1;

  TwistedVolume tv;
  tv.source = Image(g3);
  tv.twisted = Image(g3);
  tv.slice_maps.reserve(static_cast<std::size_t>(n));
  tv.volume_map = Transformation(g3);

  SceneParams p;
  p.cx = g3.coord(n - 1) / 2.0;
  p.cy = p.cx;
  p.l = g3.coord(n - 1);
  const double taper_radius = 0.45 * p.l;

  for (int k = 0; k < n; ++k) {
    const double zfrac = static_cast<double>(k) / (n - 1);
    const double alpha = 2.0 * M_PI * static_cast<double>(k) / n;
    const double beta = twist_max * std::sin(M_PI * zfrac);
    const double ca = std::cos(alpha), sa = std::sin(alpha);

    RotationalSpec rs;
    rs.center = {p.cx, p.cy};
    rs.radius = taper_radius;
    rs.max_angle = beta;

    Transformation slice_map(g2);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double x = g3.coord(i), y = g3.coord(j);
        const double dx = x - p.cx, dy = y - p.cy;

        // source: scene in coordinates rotated back by the per-slice pose
        const double rx = p.cx + ca * dx + sa * dy;
        const double ry = p.cy - sa * dx + ca * dy;
        tv.source.at(i, j, k) = scene_value(p, zfrac, rx, ry);

        // ground-truth forward map: tapered rotation by +beta
        const double r = std::hypot(dx, dy);
        const double th = taper_angle(rs, r);
        const double c = std::cos(th), s = std::sin(th);
        const double fx = p.cx + c * dx - s * dy;
        const double fy = p.cy + s * dx + c * dy;
        const std::size_t q2 = g2.index(i, j);
        slice_map.comp[0].v[q2] = fx;
        slice_map.comp[1].v[q2] = fy;

        // twisted slice: evaluate the scene at the exact inverse (rotation
        // by -theta at the same radius), so twisted(map(x)) == source(x)
        const double bx = p.cx + c * dx + s * dy;
        const double by = p.cy - s * dx + c * dy;
        const double bdx = bx - p.cx, bdy = by - p.cy;
        const double brx = p.cx + ca * bdx + sa * bdy;
        const double bry = p.cy - sa * bdx + ca * bdy;
        tv.twisted.at(i, j, k) = scene_value(p, zfrac, brx, bry);

        const std::size_t q3 = g3.index(i, j, k);
        tv.volume_map.comp[0].v[q3] = fx;
        tv.volume_map.comp[1].v[q3] = fy;
        tv.volume_map.comp[2].v[q3] = g3.coord(k);
      }
    slice_map.diffeomorphic = true;
    tv.slice_maps.push_back(std::move(slice_map));
  }
  tv.volume_map.diffeomorphic = min_interior_jacobian(tv.volume_map) > 0.0;
  return tv;
}

}  // namespace morphokit
