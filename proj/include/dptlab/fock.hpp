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

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "dptlab/errors.hpp"
#include "dptlab/types.hpp"

namespace dptlab {

template <typename Real>
void require_cutoff(Index cutoff) {
  if (cutoff < 2) {
    std::ostringstream os;
    os << "invalid cutoff " << cutoff << ": at least two Fock states are required";
    throw InvalidCutoff(os.str());
  }
}

/// Throws unless `op` is square with dimension `cutoff` and every entry is finite.
template <typename Derived>
void require_operator(const Eigen::MatrixBase<Derived>& op, Index cutoff, const char* what = "operator") {
  if (op.rows() != cutoff || op.cols() != cutoff) {
    std::ostringstream os;
    os << what << " is " << op.rows() << "x" << op.cols() << ", expected " << cutoff << "x" << cutoff;
    throw DimensionMismatch(os.str());
  }
  if (!op.allFinite()) {
    throw InvalidArgument(std::string(what) + " has non-finite entries");
  }
}

template <typename DerivedA, typename DerivedB>
void require_same_cutoff(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.rows() != a.cols()) throw DimensionMismatch("operator is not square");
  require_operator(b, a.rows());
}

/// Truncated bosonic annihilation operator: a[m, m+1] = sqrt(m+1).
template <typename Real = double>
Operator<Real> annihilation(Index cutoff) {
  require_cutoff<Real>(cutoff);
  Operator<Real> a = Operator<Real>::Zero(cutoff, cutoff);
  for (Index m = 0; m + 1 < cutoff; ++m) a(m, m + 1) = std::sqrt(Real(m + 1));
  return a;
}

template <typename Real = double>
Operator<Real> creation(Index cutoff) {
  return annihilation<Real>(cutoff).adjoint();
}

/// a^dagger a = diag(0, 1, ..., C-1); exact under truncation.
template <typename Real = double>
Operator<Real> number(Index cutoff) {
  require_cutoff<Real>(cutoff);
  Operator<Real> n = Operator<Real>::Zero(cutoff, cutoff);
  for (Index m = 0; m < cutoff; ++m) n(m, m) = Real(m);
  return n;
}

/// a a^dagger projected onto the retained states: diag(1, 2, ..., C).
///
/// The product of the truncated matrices would instead put 0 in the last
/// slot. The projected form keeps D[a a^dagger] acting on |m><n| as
/// -(m-n)^2/2 for every retained pair, including the top level.
template <typename Real = double>
Operator<Real> anti_normal_number(Index cutoff) {
  require_cutoff<Real>(cutoff);
  Operator<Real> n = Operator<Real>::Zero(cutoff, cutoff);
  for (Index m = 0; m < cutoff; ++m) n(m, m) = Real(m + 1);
  return n;
}

template <typename Real = double>
Operator<Real> identity(Index cutoff) {
  require_cutoff<Real>(cutoff);
  return Operator<Real>::Identity(cutoff, cutoff);
}

/// exp(i phi a^dagger a).
template <typename Real = double>
Operator<Real> phase_rotation(Real phi, Index cutoff) {
  require_cutoff<Real>(cutoff);
  Operator<Real> j = Operator<Real>::Zero(cutoff, cutoff);
  for (Index n = 0; n < cutoff; ++n) j(n, n) = std::polar(Real(1), phi * Real(n));
  return j;
}

/// Photon-number parity exp(i pi a^dagger a) with exact +-1 entries.
template <typename Real = double>
Operator<Real> parity(Index cutoff) {
  require_cutoff<Real>(cutoff);
  Operator<Real> p = Operator<Real>::Zero(cutoff, cutoff);
  for (Index n = 0; n < cutoff; ++n) p(n, n) = (n % 2 == 0) ? Real(1) : Real(-1);
  return p;
}

/// True when |alpha|^2 <= C/4, the region where D(alpha) is well represented.
template <typename Real>
bool displacement_in_range(std::complex<Real> alpha, Index cutoff) {
  return std::norm(alpha) <= Real(cutoff) / Real(4);
}

/// exp(alpha a^dagger - conj(alpha) a) on the truncated space, by scaling and squaring.
template <typename Real = double>
Operator<Real> displacement(std::complex<Real> alpha, Index cutoff, bool warn_out_of_range = true) {
  require_cutoff<Real>(cutoff);
  if (warn_out_of_range && !displacement_in_range(alpha, cutoff)) {
    std::ostringstream os;
    os << "displacement |alpha|^2 = " << std::norm(alpha) << " exceeds C/4 = " << Real(cutoff) / 4;
    warn(os.str());
  }
  if (alpha == std::complex<Real>(0)) return Operator<Real>::Identity(cutoff, cutoff);
  const Operator<Real> a = annihilation<Real>(cutoff);
  const Operator<Real> generator = alpha * a.adjoint() - std::conj(alpha) * a;
  return generator.exp();
}

/// <m|D(beta)|n> of the untruncated displacement for m, n < C, by the normalized Laguerre recurrence
/// f_j = sqrt(j!/(j+k)!) |beta|^k e^{-|beta|^2/2} L_j^(k)(|beta|^2). Accurate for |beta|^2 up to a few hundred.
template <typename Real = double>
Operator<Real> displacement_elements(std::complex<Real> beta, Index cutoff) {
  require_cutoff<Real>(cutoff);
  using std::sqrt;
  const Real x = std::norm(beta);
  Operator<Real> d = Operator<Real>::Zero(cutoff, cutoff);
  if (x == Real(0)) return Operator<Real>::Identity(cutoff, cutoff);
  const std::complex<Real> phase = beta / std::abs(beta);
  const std::complex<Real> back = -std::conj(phase);
  std::vector<Real> f(static_cast<std::size_t>(cutoff));
  std::complex<Real> up(1), down(1);
  for (Index k = 0; k < cutoff; ++k) {
    const Index len = cutoff - k;
    f[0] = std::exp(Real(0.5) * Real(k) * std::log(x) - x / 2 - Real(0.5) * std::lgamma(Real(k + 1)));
    if (len > 1) f[1] = f[0] * (Real(1 + k) - x) / sqrt(Real(k + 1));
    for (Index j = 1; j + 1 < len; ++j) {
      f[j + 1] = ((Real(2 * j + 1 + k) - x) * f[j] - sqrt(Real(j) * Real(j + k)) * f[j - 1]) /
                 sqrt(Real(j + 1) * Real(j + k + 1));
    }
    for (Index j = 0; j < len; ++j) {
      d(j + k, j) = up * f[j];
      if (k > 0) d(j, j + k) = down * f[j];
    }
    up *= phase;
    down *= back;
  }
  return d;
}

/// Normalized truncated coherent vector. Throws when the retained norm is below 0.999.
template <typename Real = double>
ComplexVector<Real> coherent_vector(std::complex<Real> alpha, Index cutoff) {
  require_cutoff<Real>(cutoff);
  if (!displacement_in_range(alpha, cutoff)) {
    std::ostringstream os;
    os << "coherent amplitude |alpha|^2 = " << std::norm(alpha) << " exceeds C/4 = " << Real(cutoff) / 4;
    warn(os.str());
  }
  ComplexVector<Real> v(cutoff);
  v(0) = std::exp(-std::norm(alpha) / Real(2));
  for (Index n = 1; n < cutoff; ++n) v(n) = v(n - 1) * alpha / std::sqrt(Real(n));
  const Real norm = v.norm();
  if (norm * norm < Real(0.999)) {
    std::ostringstream os;
    os << "cutoff " << cutoff << " retains only " << norm * norm
       << " of the coherent state norm at |alpha| = " << std::abs(alpha);
    throw InsufficientCutoff(os.str());
  }
  return v / norm;
}

/// Hermitian, unit-trace, positive-semidefinite operator (all up to `tolerance`).
template <typename Real = double>
class DensityMatrix {
 public:
  static constexpr double kDefaultTolerance = 1e-9;

  /// Validates `op`; throws InvalidArgument on violation.
  explicit DensityMatrix(Operator<Real> op, Real tolerance = Real(kDefaultTolerance))
      : op_(std::move(op)), tolerance_(tolerance) {
    if (op_.rows() != op_.cols()) throw DimensionMismatch("density matrix is not square");
    require_cutoff<Real>(op_.rows());
    require_operator(op_, op_.rows(), "density matrix");
    const Real herm = max_abs(Operator<Real>(op_ - op_.adjoint()));
    if (herm > tolerance_) {
      throw InvalidArgument("density matrix is not Hermitian (deviation " + std::to_string(double(herm)) + ")");
    }
    const Real trace_dev = std::abs(op_.trace() - std::complex<Real>(1));
    if (trace_dev > tolerance_) {
      throw InvalidArgument("density matrix trace deviates from 1 by " + std::to_string(double(trace_dev)));
    }
    const Real floor = min_eigenvalue();
    if (floor < -tolerance_) {
      throw InvalidArgument("density matrix has negative eigenvalue " + std::to_string(double(floor)));
    }
  }

  const Operator<Real>& matrix() const noexcept { return op_; }
  Index cutoff() const noexcept { return op_.rows(); }
  Real tolerance() const noexcept { return tolerance_; }

  Real min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Operator<Real>> es(Operator<Real>((op_ + op_.adjoint()) / Real(2)),
                                                     Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  Real purity() const { return std::real((op_ * op_).trace()); }

 private:
  Operator<Real> op_;
  Real tolerance_;
};

using DensityMatrixXcd = DensityMatrix<double>;

/// |psi><psi| for a normalized state vector.
template <typename Real = double>
DensityMatrix<Real> pure_state(const ComplexVector<Real>& psi) {
  return DensityMatrix<Real>(psi * psi.adjoint());
}

/// Fock projector |n><n|.
template <typename Real = double>
DensityMatrix<Real> fock_state(Index n, Index cutoff) {
  require_cutoff<Real>(cutoff);
  if (n < 0 || n >= cutoff) throw InvalidArgument("Fock index outside the truncated space");
  Operator<Real> op = Operator<Real>::Zero(cutoff, cutoff);
  op(n, n) = Real(1);
  return DensityMatrix<Real>(std::move(op));
}

template <typename Real = double>
DensityMatrix<Real> coherent_state(std::complex<Real> alpha, Index cutoff) {
  const ComplexVector<Real> v = coherent_vector(alpha, cutoff);
  Operator<Real> op = v * v.adjoint();
  // Rank-one projector of a unit vector; renormalize away rounding.
  op /= op.trace();
  return DensityMatrix<Real>(std::move(op));
}

/// Tr[rho op].
template <typename Real, typename Derived>
std::complex<Real> expectation(const DensityMatrix<Real>& rho, const Eigen::MatrixBase<Derived>& op) {
  require_operator(op, rho.cutoff());
  return (rho.matrix().transpose().cwiseProduct(op)).sum();
}

/// Tr[rho op] for an arbitrary (not necessarily valid) matrix.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar trace_product(const Eigen::MatrixBase<DerivedA>& rho, const Eigen::MatrixBase<DerivedB>& op) {
  require_same_cutoff(rho, op);
  return (rho.transpose().cwiseProduct(op)).sum();
}

}  // namespace dptlab
