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

#ifndef MORPHOKIT_ERRORS_HPP
#define MORPHOKIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace morphokit {

/// Base class for all morphokit errors.
class error : public std::runtime_error {
public:
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// Operation applied to a field of the wrong dimensionality.
class dimension_error : public error {
public:
  explicit dimension_error(const std::string& what) : error(what) {}
};

/// Two fields that must live on the same grid do not.
class grid_mismatch : public error {
public:
  explicit grid_mismatch(const std::string& what) : error(what) {}
};

/// A parameter is outside its documented range.
class spec_out_of_range : public error {
public:
  explicit spec_out_of_range(const std::string& what) : error(what) {}
};

/// An iterative solver hit its iteration cap before reaching tolerance.
class convergence_failure : public error {
public:
  convergence_failure(const std::string& what, double residual)
      : error(what), residual_(residual) {}
  double residual() const { return residual_; }

private:
  double residual_;
};

/// A prescribed Jacobian target is not strictly positive.
class non_positive_target : public error {
public:
  explicit non_positive_target(const std::string& what) : error(what) {}
};

/// An operation that needs at least one input got none.
class empty_input : public error {
public:
  explicit empty_input(const std::string& what) : error(what) {}
};

/// The per-node Jacobian sum in a correction-field computation is <= 0.
class singular_jacobian_sum : public error {
public:
  explicit singular_jacobian_sum(const std::string& what) : error(what) {}
};

/// Malformed or inconsistent file contents.
class io_error : public error {
public:
  explicit io_error(const std::string& what) : error(what) {}
};

}  // namespace morphokit

#endif
