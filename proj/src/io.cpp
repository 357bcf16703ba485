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

#include "morphokit/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace morphokit {

namespace {

namespace fs = std::filesystem;

[[noreturn]] void fail(const std::string& path, const std::string& why) {
  throw io_error(path + ": " + why);
}

}  // namespace

MfldData read_mfld(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open");
  std::string magic;
  in >> magic;
  if (magic != "MFLD") fail(path, "not an MFLD file");
  int dim = 0, ncomp = 0;
  in >> dim >> ncomp;
  if (!in || (dim != 2 && dim != 3)) fail(path, "bad dim");
  if (ncomp < 1 || ncomp > 3) fail(path, "bad component count");
  GridSpec g;
  g.dim = dim;
  in >> g.nx >> g.ny;
  if (dim == 3) in >> g.nz;
  in >> g.spacing;
  if (!in) fail(path, "bad header");
  try {
    g.validate();
  } catch (const error& e) {
    fail(path, e.what());
  }

  MfldData d;
  d.grid = g;
  d.components.assign(static_cast<std::size_t>(ncomp), ScalarField(g));
  for (auto& comp : d.components)
    for (auto& v : comp.v) {
      in >> v;
      if (!in) fail(path, "truncated value section");
      if (!std::isfinite(v)) fail(path, "non-finite value");
    }
  std::string extra;
  if (in >> extra) fail(path, "trailing data after value section");
  return d;
}

void write_mfld(const std::string& path, const GridSpec& grid,
                std::span<const ScalarField> components) {
  grid.validate();
  if (components.empty()) throw empty_input("write_mfld: no components");
  for (const auto& c : components)
    require_same_grid(c.grid, grid, "write_mfld");

  std::ofstream out(path);
  if (!out) fail(path, "cannot open for writing");
  char buf[64];
  out << "MFLD " << grid.dim << ' ' << components.size() << ' ' << grid.nx
      << ' ' << grid.ny;
  if (grid.dim == 3) out << ' ' << grid.nz;
  std::snprintf(buf, sizeof buf, "%.17g", grid.spacing);
  out << ' ' << buf << '\n';
  for (const auto& comp : components) {
    int col = 0;
    for (double v : comp.v) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << buf << (++col % 4 == 0 ? '\n' : ' ');
    }
    if (col % 4 != 0) out << '\n';
  }
  if (!out) fail(path, "write failed");
}

void write_mfld(const std::string& path, const ScalarField& f) {
  write_mfld(path, f.grid, std::span<const ScalarField>(&f, 1));
}

void write_mfld(const std::string& path, const Transformation& t) {
  write_mfld(path, t.grid, std::span<const ScalarField>(t.comp.data(), t.comp.size()));
}

void write_mfld(const std::string& path, const VectorField& f) {
  write_mfld(path, f.grid, std::span<const ScalarField>(f.comp.data(), f.comp.size()));
}

Transformation as_transformation(const MfldData& d) {
  if (static_cast<int>(d.components.size()) != d.grid.dim)
    throw io_error("field container: component count != dim, not a transformation");
  Transformation t(d.grid);
  t.comp = d.components;
  return t;
}

VectorField as_vector_field(const MfldData& d) {
  if (static_cast<int>(d.components.size()) != d.grid.dim)
    throw io_error("field container: component count != dim, not a vector field");
  VectorField f(d.grid);
  f.comp = d.components;
  return f;
}

ScalarField as_scalar_field(const MfldData& d) {
  if (d.components.size() != 1)
    throw io_error("field container: expected exactly one component");
  return d.components[0];
}

namespace {

int pgm_next_int(std::istream& in, const std::string& path) {
  // skips whitespace and # comments
  for (;;) {
    int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
      continue;
    }
    if (std::isspace(c)) {
      in.get();
      continue;
    }
    break;
  }
  int v = 0;
  in >> v;
  if (!in) fail(path, "bad PGM header");
  return v;
}

}  // namespace

Image read_pgm(const std::string& path, double spacing) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open");
  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  if (m0 != 'P' || (m1 != '2' && m1 != '5')) fail(path, "not a P2/P5 PGM");
  const bool binary = (m1 == '5');
  const int w = pgm_next_int(in, path);
  const int h = pgm_next_int(in, path);
  const int maxval = pgm_next_int(in, path);
  if (w < 3 || h < 3) fail(path, "image too small (need >= 3x3)");
  if (maxval < 1 || maxval > 255) fail(path, "maxval must be in 1..255");

  GridSpec g;
  g.dim = 2;
  g.nx = w;
  g.ny = h;
  g.spacing = spacing;
  Image img(g);
  const double inv = 1.0 / maxval;

  if (binary) {
    in.get(); // single whitespace after maxval
    std::vector<unsigned char> row(static_cast<std::size_t>(w));
    for (int j = 0; j < h; ++j) {
      in.read(reinterpret_cast<char*>(row.data()), w);
      if (!in) fail(path, "truncated pixel data");
      for (int i = 0; i < w; ++i) img.at(i, j) = row[static_cast<std::size_t>(i)] * inv;
    }
  } else {
    for (int j = 0; j < h; ++j)
      for (int i = 0; i < w; ++i) {
        int v = 0;
        in >> v;
        if (!in) fail(path, "truncated pixel data");
        if (v < 0 || v > maxval) fail(path, "pixel out of range");
        img.at(i, j) = v * inv;
      }
  }
  return img;
}

void write_pgm(const std::string& path, const Image& img) {
  if (img.grid.dim != 2) throw dimension_error("write_pgm: 2D images only");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open for writing");
  out << "P5\n" << img.grid.nx << ' ' << img.grid.ny << "\n255\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(img.grid.nx));
  for (int j = 0; j < img.grid.ny; ++j) {
    for (int i = 0; i < img.grid.nx; ++i) {
      double v = img.at(i, j);
      v = std::min(1.0, std::max(0.0, v));
      row[static_cast<std::size_t>(i)] =
          static_cast<unsigned char>(std::lround(v * 255.0));
    }
    out.write(reinterpret_cast<const char*>(row.data()), img.grid.nx);
  }
  if (!out) fail(path, "write failed");
}

Image read_volume_manifest(const std::string& path, double spacing) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open");
  const fs::path base = fs::path(path).parent_path();
  std::vector<std::string> slices;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
      line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    slices.push_back((base / line).string());
  }
  if (slices.size() < 3) fail(path, "volume needs at least 3 slices");

  Image first = read_pgm(slices[0], spacing);
  GridSpec g;
  g.dim = 3;
  g.nx = first.grid.nx;
  g.ny = first.grid.ny;
  g.nz = static_cast<int>(slices.size());
  g.spacing = spacing;
  Image vol(g);
  for (int k = 0; k < g.nz; ++k) {
    Image s = (k == 0) ? std::move(first) : read_pgm(slices[static_cast<std::size_t>(k)], spacing);
    if (s.grid.nx != g.nx || s.grid.ny != g.ny)
      fail(slices[static_cast<std::size_t>(k)], "slice size differs from first slice");
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) vol.at(i, j, k) = s.at(i, j);
  }
  return vol;
}

void write_volume_manifest(const std::string& path, const Image& volume) {
  if (volume.grid.dim != 3)
    throw dimension_error("write_volume_manifest: 3D volumes only");
  const fs::path mpath(path);
  const fs::path base = mpath.parent_path();
  const std::string stem = mpath.stem().string();
  std::ofstream out(path);
  if (!out) fail(path, "cannot open for writing");

  GridSpec g2;
  g2.dim = 2;
  g2.nx = volume.grid.nx;
  g2.ny = volume.grid.ny;
  g2.spacing = volume.grid.spacing;
  for (int k = 0; k < volume.grid.nz; ++k) {
    char name[256];
    std::snprintf(name, sizeof name, "%s_slice_%04d.pgm", stem.c_str(), k);
    Image s(g2);
    for (int j = 0; j < g2.ny; ++j)
      for (int i = 0; i < g2.nx; ++i) s.at(i, j) = volume.at(i, j, k);
    write_pgm((base / name).string(), s);
    out << name << '\n';
  }
  if (!out) fail(path, "write failed");
}

}  // namespace morphokit
