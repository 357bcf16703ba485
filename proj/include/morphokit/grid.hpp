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

#ifndef MORPHOKIT_GRID_HPP
#define MORPHOKIT_GRID_HPP

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "morphokit/errors.hpp"

namespace morphokit {

/// Regular node-centered grid over [0, (n-1)*spacing] per axis.
///
/// Nodes are stored row-major with x fastest:
///   index(i,j,k) = (k*ny + j)*nx + i.
/// The physical coordinate of node i along an axis is i*spacing.
struct GridSpec {
  int dim = 2;       // 2 or 3
  int nx = 0;        // nodes along x, >= 3
  int ny = 0;        // nodes along y, >= 3
  int nz = 1;        // nodes along z (3D only), >= 3 when dim == 3
  double spacing = 1.0;

  std::size_t node_count() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) *
           static_cast<std::size_t>(dim == 3 ? nz : 1);
  }

  int extent(int axis) const { return axis == 0 ? nx : (axis == 1 ? ny : nz); }

  std::size_t index(int i, int j, int k = 0) const {
    return (static_cast<std::size_t>(k) * ny + j) * nx + i;
  }

  double coord(int i) const { return i * spacing; }

  /// Node lies on the grid boundary (any face).
  bool on_boundary(int i, int j, int k = 0) const {
    if (i == 0 || i == nx - 1 || j == 0 || j == ny - 1) return true;
    if (dim == 3 && (k == 0 || k == nz - 1)) return true;
    return false;
  }

  bool operator==(const GridSpec& o) const {
    return dim == o.dim && nx == o.nx && ny == o.ny &&
           (dim == 2 || nz == o.nz) && spacing == o.spacing;
  }
  bool operator!=(const GridSpec& o) const { return !(*this == o); }

  /// Throws spec_out_of_range unless the spec is usable (dim 2/3, extents >= 3,
  /// spacing > 0).
  void validate() const;
};

/// Throws grid_mismatch unless a and b describe the same grid.
void require_same_grid(const GridSpec& a, const GridSpec& b, const char* where);

/// One double per node.
struct ScalarField {
  GridSpec grid;
  std::vector<double> v;

  ScalarField() = default;
  explicit ScalarField(const GridSpec& g, double fill = 0.0)
      : grid(g), v(g.node_count(), fill) {}

  double& at(int i, int j, int k = 0) { return v[grid.index(i, j, k)]; }
  double at(int i, int j, int k = 0) const { return v[grid.index(i, j, k)]; }
  std::size_t size() const { return v.size(); }
};

/// dim components, each a ScalarField on the same grid. Used for control
/// fields (Poisson right-hand sides) and gradients.
struct VectorField {
  GridSpec grid;
  std::vector<ScalarField> comp;

  VectorField() = default;
  explicit VectorField(const GridSpec& g)
      : grid(g), comp(static_cast<std::size_t>(g.dim), ScalarField(g)) {}
};

/// A map T: grid -> R^dim stored as mapped coordinates per node (not
/// displacements). comp[c].v[p] is coordinate c of T(node p).
struct Transformation {
  GridSpec grid;
  std::vector<ScalarField> comp;
  /// Set by producers that have verified min interior Jacobian > 0.
  bool diffeomorphic = false;

  Transformation() = default;
  explicit Transformation(const GridSpec& g)
      : grid(g), comp(static_cast<std::size_t>(g.dim), ScalarField(g)) {}
};

/// Scalar intensity image on a grid, values in [0,1]. 3D images are volumes.
struct Image {
  GridSpec grid;
  std::vector<double> v;

  Image() = default;
  explicit Image(const GridSpec& g, double fill = 0.0)
      : grid(g), v(g.node_count(), fill) {}

  double& at(int i, int j, int k = 0) { return v[grid.index(i, j, k)]; }
  double at(int i, int j, int k = 0) const { return v[grid.index(i, j, k)]; }
  std::size_t size() const { return v.size(); }
};

/// T(x) = x at every node.
Transformation identity_transform(const GridSpec& g);

/// Max over boundary nodes of |T(x) - x| (Euclidean). 0 for maps that keep
/// the boundary pinned.
double boundary_displacement(const Transformation& t);

/// Max over all nodes of |T(x) - x| (Euclidean).
double max_displacement(const Transformation& t);

/// Max over all nodes of the Euclidean distance between a(x) and b(x).
double max_node_distance(const Transformation& a, const Transformation& b);

}  // namespace morphokit

#endif
