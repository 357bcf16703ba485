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

#include "morphokit/render.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "morphokit/field_ops.hpp"

#include "json.hpp"

namespace morphokit {

namespace {

// darken pixels within reach of the segment (a, b), coordinates in pixels
void draw_segment(Image& img, double ax, double ay, double bx, double by) {
  const double half_width = 0.45, aa = 0.6;
  const int x0 = std::max(0, static_cast<int>(std::floor(std::min(ax, bx) - 2)));
  const int x1 = std::min(img.grid.nx - 1,
                          static_cast<int>(std::ceil(std::max(ax, bx) + 2)));
  const int y0 = std::max(0, static_cast<int>(std::floor(std::min(ay, by) - 2)));
  const int y1 = std::min(img.grid.ny - 1,
                          static_cast<int>(std::ceil(std::max(ay, by) + 2)));
  const double vx = bx - ax, vy = by - ay;
  const double len2 = vx * vx + vy * vy;
  for (int py = y0; py <= y1; ++py)
    for (int px = x0; px <= x1; ++px) {
      double t = 0.0;
      if (len2 > 0.0)
        t = std::clamp(((px - ax) * vx + (py - ay) * vy) / len2, 0.0, 1.0);
      const double dx = px - (ax + t * vx), dy = py - (ay + t * vy);
      const double d = std::hypot(dx, dy);
      const double cov = std::clamp(0.5 + (half_width - d) / aa, 0.0, 1.0);
      double& p = img.at(px, py);
      p = std::min(p, 1.0 - cov);
    }
}

}  // namespace

Image render_grid(const Transformation& t, int stride) {
  t.grid.validate();
  if (t.grid.dim != 2) throw dimension_error("render_grid: 2D maps only");
  if (stride < 1) throw spec_out_of_range("render_grid: stride must be >= 1");
  const GridSpec& g = t.grid;
  Image img(g, 1.0);
  const double invh = 1.0 / g.spacing;

  auto draw_polyline_x = [&](int i) {
    for (int j = 0; j + 1 < g.ny; ++j)
      draw_segment(img, t.comp[0].at(i, j) * invh, t.comp[1].at(i, j) * invh,
                   t.comp[0].at(i, j + 1) * invh,
                   t.comp[1].at(i, j + 1) * invh);
  };
  auto draw_polyline_y = [&](int j) {
    for (int i = 0; i + 1 < g.nx; ++i)
      draw_segment(img, t.comp[0].at(i, j) * invh, t.comp[1].at(i, j) * invh,
                   t.comp[0].at(i + 1, j) * invh,
                   t.comp[1].at(i + 1, j) * invh);
  };

  for (int i = 0; i < g.nx; i += stride) draw_polyline_x(i);
  if ((g.nx - 1) % stride != 0) draw_polyline_x(g.nx - 1);
  for (int j = 0; j < g.ny; j += stride) draw_polyline_y(j);
  if ((g.ny - 1) % stride != 0) draw_polyline_y(g.ny - 1);
  return img;
}

TransformStats transform_stats(const Transformation& t) {
  t.grid.validate();
  TransformStats s;
  s.dim = t.grid.dim;
  const ScalarField J = jacobian_det(t);
  double mn = J.v[0], mx = J.v[0], acc = 0.0;
  for (double v : J.v) {
    mn = std::min(mn, v);
    mx = std::max(mx, v);
    acc += v;
  }
  s.min_jacobian = mn;
  s.max_jacobian = mx;
  s.mean_jacobian = acc / static_cast<double>(J.v.size());

  if (t.grid.dim == 2) {
    const ScalarField c = curl2d(t);
    mn = c.v[0];
    mx = c.v[0];
    acc = 0.0;
    for (double v : c.v) {
      mn = std::min(mn, v);
      mx = std::max(mx, v);
      acc += v;
    }
    s.min_curl = mn;
    s.max_curl = mx;
    s.mean_curl = acc / static_cast<double>(c.v.size());
  } else {
    const VectorField c = curl3d(t);
    mn = 0.0;
    mx = 0.0;
    acc = 0.0;
    for (std::size_t q = 0; q < c.comp[0].v.size(); ++q) {
      const double n = std::sqrt(c.comp[0].v[q] * c.comp[0].v[q] +
                                 c.comp[1].v[q] * c.comp[1].v[q] +
                                 c.comp[2].v[q] * c.comp[2].v[q]);
      if (q == 0) mn = mx = n;
      mn = std::min(mn, n);
      mx = std::max(mx, n);
      acc += n;
    }
    s.min_curl = mn;
    s.max_curl = mx;
    s.mean_curl = acc / static_cast<double>(c.comp[0].v.size());
  }
  s.max_displacement = max_displacement(t);
  s.boundary_displacement = boundary_displacement(t);
  return s;
}

std::string stats_json(const TransformStats& s) {
  nlohmann::json j;
  j["dim"] = s.dim;
  j["jacobian"] = {{"min", s.min_jacobian},
                   {"max", s.max_jacobian},
                   {"mean", s.mean_jacobian}};
  j["curl"] = {{"min", s.min_curl}, {"max", s.max_curl}, {"mean", s.mean_curl}};
  j["max_displacement"] = s.max_displacement;
  j["boundary_displacement"] = s.boundary_displacement;
  return j.dump(2);
}

}  // namespace morphokit
