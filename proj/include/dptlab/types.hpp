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

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

namespace dptlab {

using Index = Eigen::Index;

/// Dense complex matrix over truncated Fock states |0>..|C-1>.
template <typename Real = double>
using Operator = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real = double>
using ComplexVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

using OperatorXcd = Operator<double>;
using VectorXcd = ComplexVector<double>;
using cdouble = std::complex<double>;

/// Weak-symmetry group attached to a model.
enum class SymmetryKind { U1, Z2, None };

inline const char* to_string(SymmetryKind kind) {
  switch (kind) {
    case SymmetryKind::U1: return "U1";
    case SymmetryKind::Z2: return "Z2";
    case SymmetryKind::None: return "none";
  }
  return "none";
}

/// Largest entry magnitude; zero for empty matrices.
template <typename Derived>
typename Derived::RealScalar max_abs(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return typename Derived::RealScalar(0);
  return m.cwiseAbs().maxCoeff();
}

}  // namespace dptlab
