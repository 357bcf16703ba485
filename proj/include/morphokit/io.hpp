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

#ifndef MORPHOKIT_IO_HPP
#define MORPHOKIT_IO_HPP

#include <span>
#include <string>
#include <vector>

#include "morphokit/grid.hpp"

namespace morphokit {

/// Field container file (text): line 1 is
///   MFLD <dim> <ncomponents> <nx> <ny> [<nz>] <spacing>
/// followed by node values in component-major order, each component row-major
/// with x fastest, written with 17 significant digits (round-trip exact).
struct MfldData {
  GridSpec grid;
  std::vector<ScalarField> components;
};

MfldData read_mfld(const std::string& path);
void write_mfld(const std::string& path, const GridSpec& grid,
                std::span<const ScalarField> components);

void write_mfld(const std::string& path, const ScalarField& f);
void write_mfld(const std::string& path, const Transformation& t);
void write_mfld(const std::string& path, const VectorField& f);

/// Throws io_error unless the component count matches the container's dim.
Transformation as_transformation(const MfldData& d);
VectorField as_vector_field(const MfldData& d);
/// Throws io_error unless the container has exactly one component.
ScalarField as_scalar_field(const MfldData& d);

/// 8-bit PGM, P2 or P5 accepted on read, values scaled to [0,1]; written as
/// P5 with values rounded back to 0..255. `spacing` applies to the loaded
/// grid.
Image read_pgm(const std::string& path, double spacing = 1.0);
void write_pgm(const std::string& path, const Image& img);

/// Volumes are a text manifest (one slice path per line, bottom slice first,
/// paths relative to the manifest) plus the PGM slices it names.
Image read_volume_manifest(const std::string& path, double spacing = 1.0);
void write_volume_manifest(const std::string& path, const Image& volume);

}  // namespace morphokit

#endif
