// Copyright 2026 The dptlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace dptlab {

/// Base of every library error. Numerical failures map to CLI exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidCutoff : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Truncated coherent vector lost too much norm.
class InsufficientCutoff : public Error {
 public:
  using Error::Error;
};

/// Dense allocation would exceed the configured memory bound.
class MemoryBoundExceeded : public Error {
 public:
  using Error::Error;
};

/// Cross-sector leakage above tolerance.
class SymmetryViolation : public Error {
 public:
  SymmetryViolation(const std::string& what, double leakage)
      : Error(what), leakage_(leakage) {}
  double leakage() const noexcept { return leakage_; }

 private:
  double leakage_;
};

class DegenerateSteadyState : public Error {
 public:
  DegenerateSteadyState(const std::string& what, long dimension)
      : Error(what), dimension_(dimension) {}
  long dimension() const noexcept { return dimension_; }

 private:
  long dimension_;
};

class NormalizationError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class StiffnessError : public Error {
 public:
  using Error::Error;
};

/// Population reached the top of the truncated space during evolution.
class CutoffTooSmall : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

using WarningHandler = std::function<void(const std::string&)>;

/// Installs a sink for non-fatal warnings (stderr by default). Returns the old one.
WarningHandler set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

}  // namespace dptlab
