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

#include <cstdlib>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dptlab/lindblad.hpp"

namespace dptlab {

/// Weak-symmetry sector: the dyads |m><n| on which the symmetry superoperator acts as u^(k).
struct SymmetrySector {
  SymmetryKind group = SymmetryKind::U1;
  int k = 0;
  Index cutoff = 0;
  /// (m, n) Fock index pairs, ascending m then ascending n.
  std::vector<std::pair<Index, Index>> basis;

  Index size() const noexcept { return static_cast<Index>(basis.size()); }

  /// U1: exp(-i phi k); Z2: exp(i pi k) (phi ignored).
  std::complex<double> eigenvalue(double phi = 0.0) const {
    if (group == SymmetryKind::Z2) return k % 2 == 0 ? 1.0 : -1.0;
    return std::polar(1.0, -phi * k);
  }

  bool contains(Index m, Index n) const noexcept;
  std::string label() const { return std::string(to_string(group)) + ":" + std::to_string(k); }
};

/// Sector label of the dyad |m><n|: m - n for U1, (m - n) mod 2 for Z2.
inline int sector_label(SymmetryKind group, Index m, Index n) {
  const Index diff = m - n;
  if (group == SymmetryKind::Z2) return static_cast<int>(((diff % 2) + 2) % 2);
  return static_cast<int>(diff);
}

inline bool SymmetrySector::contains(Index m, Index n) const noexcept {
  if (m < 0 || n < 0 || m >= cutoff || n >= cutoff) return false;
  return sector_label(group, m, n) == k;
}

/// U1 sectors k = -kmax..kmax; sector k holds {(m, m-k)}.
inline std::vector<SymmetrySector> u1_sectors(Index cutoff, Index kmax) {
  require_cutoff<double>(cutoff);
  if (kmax < 0 || kmax > cutoff - 1) {
    throw InvalidArgument("kmax " + std::to_string(kmax) + " outside [0, " + std::to_string(cutoff - 1) + "]");
  }
  std::vector<SymmetrySector> out;
  for (Index k = -kmax; k <= kmax; ++k) {
    SymmetrySector s{SymmetryKind::U1, static_cast<int>(k), cutoff, {}};
    for (Index m = std::max<Index>(0, k); m <= cutoff - 1 + std::min<Index>(0, k); ++m) s.basis.emplace_back(m, m - k);
    out.push_back(std::move(s));
  }
  return out;
}

inline SymmetrySector u1_sector(Index cutoff, int k) {
  if (std::abs(k) > cutoff - 1) throw InvalidArgument("U1 sector label outside the truncated space");
  auto all = u1_sectors(cutoff, std::abs(k));
  return all[static_cast<std::size_t>(k + std::abs(k))];
}

/// Z2 sectors: k = 0 (m - n even) and k = 1 (m - n odd).
inline std::vector<SymmetrySector> z2_sectors(Index cutoff) {
  require_cutoff<double>(cutoff);
  std::vector<SymmetrySector> out;
  for (int k = 0; k < 2; ++k) {
    SymmetrySector s{SymmetryKind::Z2, k, cutoff, {}};
    for (Index m = 0; m < cutoff; ++m)
      for (Index n = 0; n < cutoff; ++n)
        if (sector_label(SymmetryKind::Z2, m, n) == k) s.basis.emplace_back(m, n);
    out.push_back(std::move(s));
  }
  return out;
}

inline SymmetrySector z2_sector(Index cutoff, int k) {
  if (k != 0 && k != 1) throw InvalidArgument("Z2 sector label must be 0 or 1");
  return z2_sectors(cutoff)[static_cast<std::size_t>(k)];
}

/// Sector k = 0 of the given group; the whole space when the group is None.
inline SymmetrySector symmetric_sector(SymmetryKind group, Index cutoff) {
  if (group == SymmetryKind::U1) return u1_sector(cutoff, 0);
  if (group == SymmetryKind::Z2) return z2_sector(cutoff, 0);
  SymmetrySector s{SymmetryKind::None, 0, cutoff, {}};
  for (Index m = 0; m < cutoff; ++m)
    for (Index n = 0; n < cutoff; ++n) s.basis.emplace_back(m, n);
  return s;
}

/// Zero except on the sector's entries.
template <typename Real>
Operator<Real> sector_project(const Operator<Real>& rho, const SymmetrySector& sector) {
  require_operator(rho, sector.cutoff, "projected operator");
  Operator<Real> out = Operator<Real>::Zero(sector.cutoff, sector.cutoff);
  for (const auto& [m, n] : sector.basis) out(m, n) = rho(m, n);
  return out;
}

/// Sector coordinates of `op` in basis order.
template <typename Real>
ComplexVector<Real> to_sector_vector(const Operator<Real>& op, const SymmetrySector& sector) {
  require_operator(op, sector.cutoff);
  ComplexVector<Real> v(sector.size());
  for (Index i = 0; i < sector.size(); ++i) v(i) = op(sector.basis[i].first, sector.basis[i].second);
  return v;
}

template <typename Real>
Operator<Real> from_sector_vector(const ComplexVector<Real>& v, const SymmetrySector& sector) {
  if (v.size() != sector.size()) throw DimensionMismatch("sector vector length does not match the sector basis");
  Operator<Real> op = Operator<Real>::Zero(sector.cutoff, sector.cutoff);
  for (Index i = 0; i < sector.size(); ++i) op(sector.basis[i].first, sector.basis[i].second) = v(i);
  return op;
}

/// Generator restricted to one sector, in the sector's basis order.
template <typename Real = double>
struct SectorMatrix {
  SymmetrySector sector;
  Operator<Real> entries;
  /// Largest out-of-sector entry seen while assembling.
  Real leakage = Real(0);

  Index dim() const noexcept { return entries.rows(); }
  std::pair<Index, Index> dyad(Index position) const { return sector.basis.at(static_cast<std::size_t>(position)); }
};

struct SectorOptions {
  double leakage_tolerance = 1e-10;
};

/// B[i, j] = coefficient of basis dyad i in L(dyad j). Throws SymmetryViolation on leakage.
template <typename Real>
SectorMatrix<Real> sector_liouvillian(const Generator<Real>& generator, const SymmetrySector& sector,
                                      const SectorOptions& options = {}) {
  const Index c = generator.cutoff();
  if (sector.cutoff != c) throw DimensionMismatch("sector cutoff does not match the model cutoff");
  require_dense_allocation(sector.size(), sector.size(), "sector block " + sector.label());
  Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic> position =
      Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic>::Constant(c, c, -1);
  for (Index i = 0; i < sector.size(); ++i) position(sector.basis[i].first, sector.basis[i].second) = i;

  SectorMatrix<Real> out{sector, Operator<Real>::Zero(sector.size(), sector.size()), Real(0)};
  for (Index j = 0; j < sector.size(); ++j) {
    const auto [m, n] = sector.basis[static_cast<std::size_t>(j)];
    for (const auto& e : generator.apply_dyad(m, n)) {
      const Index i = position(e.row, e.col);
      if (i < 0) {
        out.leakage = std::max(out.leakage, std::abs(e.value));
      } else {
        out.entries(i, j) += e.value;
      }
    }
  }
  const Real scale = std::max(Real(1), max_abs(out.entries));
  if (out.leakage > Real(options.leakage_tolerance) * scale) {
    throw SymmetryViolation("generator is not block diagonal: sector " + sector.label() + " leaks " +
                                std::to_string(double(out.leakage)),
                            double(out.leakage));
  }
  return out;
}

template <typename Real>
SectorMatrix<Real> sector_liouvillian(const LindbladModel<Real>& model, const SymmetrySector& sector,
                                      const SectorOptions& options = {}) {
  return sector_liouvillian(Generator<Real>(model), sector, options);
}

struct WeakSymmetryReport {
  double max_leakage = 0.0;
  /// Largest entry of L(dyad) over the spanning set; sets the relative guard.
  double scale = 0.0;
  double tolerance = 1e-10;
  bool passed = false;
};

/// max over dyads |m><n| of ||L(J rho J^dagger) - J (L rho) J^dagger||_max.
template <typename Real>
WeakSymmetryReport verify_weak_symmetry(const LindbladModel<Real>& model, const Operator<Real>& symmetry,
                                        double tolerance = 1e-10) {
  const Index c = model.cutoff();
  require_operator(symmetry, c, "symmetry operator");
  if (max_abs(Operator<Real>(symmetry.adjoint() * symmetry - Operator<Real>::Identity(c, c))) > Real(1e-10)) {
    throw InvalidArgument("symmetry operator is not unitary on the truncated space");
  }
  const Generator<Real> gen(model);
  const std::complex<Real> i(0, 1);
  // J L(u v^dagger) J^dagger is assembled from the same rank-one terms as L, each factor mapped by J.
  const Operator<Real> h_eff = [&] {
    Operator<Real> h = model.hamiltonian();
    for (const auto& l : model.jumps()) h -= (i / Real(2)) * (l.adjoint() * l);
    return h;
  }();
  std::vector<Operator<Real>> jl;
  for (const auto& l : model.jumps()) jl.push_back(symmetry * l);
  const Operator<Real> jh = symmetry * h_eff;

  WeakSymmetryReport report;
  report.tolerance = tolerance;
  for (Index m = 0; m < c; ++m) {
    const ComplexVector<Real> jm = symmetry.col(m);
    for (Index n = 0; n < c; ++n) {
      const ComplexVector<Real> jn = symmetry.col(n);
      const Operator<Real> lhs = gen.apply_rank_one(jm, jn);
      Operator<Real> rhs = -i * (jh.col(m) * jn.adjoint() - jm * jh.col(n).adjoint());
      for (const auto& x : jl) rhs.noalias() += x.col(m) * x.col(n).adjoint();
      report.max_leakage = std::max(report.max_leakage, double(max_abs(Operator<Real>(lhs - rhs))));
      report.scale = std::max(report.scale, double(max_abs(rhs)));
    }
  }
  report.passed = report.max_leakage < tolerance * std::max(1.0, report.scale);
  return report;
}

struct SectorAction {
  SymmetrySector sector;
  /// max over sector dyads of ||D[L](dyad)||_max.
  double max_action = 0.0;
};

struct SsbRemovalReport {
  std::vector<SectorAction> sectors;
  double tolerance = 1e-12;
  bool symmetric_sector_untouched = false;
  bool other_sectors_affected = false;
  bool passed = false;
};

/// D[u v^dagger] = (L u)(L v)^dagger - (L^dagger L u) v^dagger / 2 - u (L^dagger L v)^dagger / 2.
template <typename Real>
Operator<Real> dissipator_apply_dyad(const Operator<Real>& jump, const Operator<Real>& jump_sq, Index m, Index n) {
  Operator<Real> out = jump.col(m) * jump.col(n).adjoint();
  out.col(n) -= jump_sq.col(m) / Real(2);
  out.row(m) -= jump_sq.col(n).adjoint() / Real(2);
  return out;
}

/// Checks that D[L] annihilates sector 0 while acting on every k != 0 sector.
template <typename Real>
SsbRemovalReport ssb_removal_check(const LindbladModel<Real>& model, const Operator<Real>& added,
                                   const std::vector<SymmetrySector>& sectors, double tolerance = 1e-12) {
  require_operator(added, model.cutoff(), "added jump operator");
  const Operator<Real> added_sq = added.adjoint() * added;
  SsbRemovalReport report;
  report.tolerance = tolerance;
  report.symmetric_sector_untouched = true;
  report.other_sectors_affected = true;
  bool saw_zero = false;
  for (const auto& sector : sectors) {
    if (sector.cutoff != model.cutoff()) throw DimensionMismatch("sector cutoff does not match the model cutoff");
    SectorAction action{sector, 0.0};
    for (const auto& [m, n] : sector.basis) {
      action.max_action =
          std::max(action.max_action, double(max_abs(dissipator_apply_dyad(added, added_sq, m, n))));
    }
    if (sector.k == 0) {
      saw_zero = true;
      report.symmetric_sector_untouched = report.symmetric_sector_untouched && action.max_action < tolerance;
    } else {
      report.other_sectors_affected = report.other_sectors_affected && action.max_action > tolerance;
    }
    report.sectors.push_back(std::move(action));
  }
  report.passed = saw_zero && report.symmetric_sector_untouched && report.other_sectors_affected;
  return report;
}

struct SectorShift {
  SymmetrySector sector;
  /// Mean diagonal of B(model + D[L]) - B(model).
  std::complex<double> shift;
  /// Largest entry of that difference minus shift * Identity.
  double deviation = 0.0;
};

/// Measures how adding D[L] changes one sector block, as a multiple of the identity.
template <typename Real>
SectorShift measure_sector_shift(const LindbladModel<Real>& model, const Operator<Real>& added,
                                 const SymmetrySector& sector, const SectorOptions& options = {}) {
  const auto base = sector_liouvillian(model, sector, options);
  const auto extended = sector_liouvillian(add_dissipator(model, added), sector, options);
  const Operator<Real> diff = extended.entries - base.entries;
  const std::complex<Real> shift = diff.diagonal().mean();
  const Operator<Real> residual = diff - shift * Operator<Real>::Identity(diff.rows(), diff.cols());
  return {sector, std::complex<double>(shift), double(max_abs(residual))};
}

}  // namespace dptlab
