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

#include <algorithm>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Sparse>
#include <unsupported/Eigen/KroneckerProduct>

#include "dptlab/fock.hpp"
#include "dptlab/memory.hpp"

namespace dptlab {

/// Hamiltonian plus jump operators with rates folded in (L = sqrt(rate) * O).
template <typename Real = double>
class LindbladModel {
 public:
  LindbladModel(Operator<Real> hamiltonian, std::vector<Operator<Real>> jumps,
                SymmetryKind symmetry = SymmetryKind::None)
      : hamiltonian_(std::move(hamiltonian)), jumps_(std::move(jumps)), symmetry_(symmetry) {
    if (hamiltonian_.rows() != hamiltonian_.cols()) throw DimensionMismatch("Hamiltonian is not square");
    require_cutoff<Real>(hamiltonian_.rows());
    require_operator(hamiltonian_, cutoff(), "Hamiltonian");
    const Real scale = std::max(Real(1), max_abs(hamiltonian_));
    if (max_abs(Operator<Real>(hamiltonian_ - hamiltonian_.adjoint())) > Real(1e-12) * scale) {
      throw InvalidArgument("Hamiltonian is not Hermitian");
    }
    for (const auto& jump : jumps_) require_operator(jump, cutoff(), "jump operator");
  }

  const Operator<Real>& hamiltonian() const noexcept { return hamiltonian_; }
  const std::vector<Operator<Real>>& jumps() const noexcept { return jumps_; }
  SymmetryKind symmetry() const noexcept { return symmetry_; }
  Index cutoff() const noexcept { return hamiltonian_.rows(); }

 private:
  Operator<Real> hamiltonian_;
  std::vector<Operator<Real>> jumps_;
  SymmetryKind symmetry_;
};

using LindbladModelXcd = LindbladModel<double>;

/// D[L] rho = L rho L^dagger - (L^dagger L rho + rho L^dagger L) / 2.
template <typename Real, typename DerivedL, typename DerivedR>
Operator<Real> dissipator_apply(const Eigen::MatrixBase<DerivedL>& jump, const Eigen::MatrixBase<DerivedR>& rho) {
  require_same_cutoff(jump, rho);
  const Operator<Real> l = jump;
  const Operator<Real> ldl = l.adjoint() * l;
  return l * rho * l.adjoint() - (ldl * rho + rho * ldl) / Real(2);
}

template <typename Derived>
Operator<typename Derived::RealScalar> dissipator_apply(const Operator<typename Derived::RealScalar>& jump,
                                                        const Eigen::MatrixBase<Derived>& rho) {
  return dissipator_apply<typename Derived::RealScalar>(jump, rho);
}

/// -i[H, rho] + sum_j D[L_j] rho, evaluated densely.
template <typename Real, typename Derived>
Operator<Real> liouvillian_apply(const LindbladModel<Real>& model, const Eigen::MatrixBase<Derived>& rho) {
  require_operator(rho, model.cutoff(), "density matrix");
  const std::complex<Real> i(0, 1);
  const auto& h = model.hamiltonian();
  Operator<Real> out = -i * (h * rho - rho * h);
  for (const auto& jump : model.jumps()) out += dissipator_apply<Real>(jump, rho);
  return out;
}

/// New model with `jump` appended; `model` is unchanged.
template <typename Real>
LindbladModel<Real> add_dissipator(const LindbladModel<Real>& model, const Operator<Real>& jump) {
  require_operator(jump, model.cutoff(), "added jump operator");
  std::vector<Operator<Real>> jumps = model.jumps();
  jumps.push_back(jump);
  return LindbladModel<Real>(model.hamiltonian(), std::move(jumps), model.symmetry());
}

/// Column-stacked vec(rho).
template <typename Real>
ComplexVector<Real> vec(const Operator<Real>& rho) {
  return Eigen::Map<const ComplexVector<Real>>(rho.data(), rho.size());
}

template <typename Real>
Operator<Real> unvec(const ComplexVector<Real>& v, Index cutoff) {
  if (v.size() != cutoff * cutoff) throw DimensionMismatch("vector length is not C^2");
  return Eigen::Map<const Operator<Real>>(v.data(), cutoff, cutoff);
}

/// Explicit C^2 x C^2 matrix of the generator acting on column-stacked vec(rho).
template <typename Real = double>
struct SuperoperatorMatrix {
  Index cutoff = 0;
  Operator<Real> entries;

  Index dim() const noexcept { return entries.rows(); }
};

struct VectorizeOptions {
  Index max_cutoff = 60;
};

/// -i(I (x) H - H^T (x) I) + sum_j [conj(L) (x) L - 1/2 I (x) L^dagger L - 1/2 (L^dagger L)^T (x) I].
template <typename Real>
SuperoperatorMatrix<Real> vectorize(const LindbladModel<Real>& model, const VectorizeOptions& options = {}) {
  const Index c = model.cutoff();
  const std::string hint = "use the symmetry-sector decomposition instead of full vectorization";
  if (c > options.max_cutoff) {
    throw MemoryBoundExceeded("cutoff " + std::to_string(c) + " exceeds the full-vectorization bound " +
                              std::to_string(options.max_cutoff) + "; " + hint);
  }
  require_dense_allocation(c * c, c * c, "full Liouvillian", hint);
  using Op = Operator<Real>;
  const std::complex<Real> i(0, 1);
  const Op id = Op::Identity(c, c);
  const Op& h = model.hamiltonian();
  SuperoperatorMatrix<Real> out;
  out.cutoff = c;
  out.entries = -i * (Op(Eigen::kroneckerProduct(id, h)) - Op(Eigen::kroneckerProduct(h.transpose(), id)));
  for (const auto& l : model.jumps()) {
    const Op ldl = l.adjoint() * l;
    out.entries += Op(Eigen::kroneckerProduct(l.conjugate(), l));
    out.entries -= Op(Eigen::kroneckerProduct(id, ldl)) / Real(2);
    out.entries -= Op(Eigen::kroneckerProduct(ldl.transpose(), id)) / Real(2);
  }
  return out;
}

/// Sparse compiled form of a model, used on hot paths (time stepping, sector assembly).
///
/// Stores H_eff = H - (i/2) sum L^dagger L so that
/// L rho = -i (H_eff rho - rho H_eff^dagger) + sum L rho L^dagger.
template <typename Real = double>
class Generator {
 public:
  using Sparse = Eigen::SparseMatrix<std::complex<Real>, Eigen::ColMajor>;

  struct Entry {
    Index row;
    Index col;
    std::complex<Real> value;
  };

  explicit Generator(const LindbladModel<Real>& model) : cutoff_(model.cutoff()) {
    const std::complex<Real> i(0, 1);
    Operator<Real> h_eff = model.hamiltonian();
    Operator<Real> h_offdiag = model.hamiltonian();
    for (const auto& l : model.jumps()) {
      const Operator<Real> ldl = l.adjoint() * l;
      h_eff -= (i / Real(2)) * ldl;
      jumps_.push_back(l.sparseView());
      jumps_adj_.push_back(Sparse(jumps_.back().adjoint()));
      if (Operator<Real>(l.diagonal().asDiagonal()) == l) {
        diagonal_jumps_.push_back(l.diagonal());
      } else {
        h_offdiag -= (i / Real(2)) * ldl;
        offdiag_jumps_.push_back(jumps_.back());
      }
    }
    h_eff_ = h_eff.sparseView();
    h_eff_adj_ = Sparse(h_eff_.adjoint());
    h_dyad_ = h_offdiag.sparseView();
  }

  Index cutoff() const noexcept { return cutoff_; }

  template <typename Derived>
  Operator<Real> apply(const Eigen::MatrixBase<Derived>& rho) const {
    Operator<Real> out(cutoff_, cutoff_);
    apply_into(rho, out);
    return out;
  }

  template <typename Derived>
  void apply_into(const Eigen::MatrixBase<Derived>& rho, Operator<Real>& out) const {
    const std::complex<Real> i(0, 1);
    out.noalias() = h_eff_ * rho;
    out.noalias() -= rho * h_eff_adj_;
    out *= -i;
    Operator<Real> tmp(cutoff_, cutoff_);
    for (std::size_t j = 0; j < jumps_.size(); ++j) {
      tmp.noalias() = jumps_[j] * rho;
      out.noalias() += tmp * jumps_adj_[j];
    }
  }

  /// Entries of L(|m><n|), duplicates summed, zeros omitted. Diagonal jumps enter through their exact
  /// dyad coefficient l_m conj(l_n) - (|l_m|^2 + |l_n|^2) / 2.
  std::vector<Entry> apply_dyad(Index m, Index n) const {
    std::unordered_map<Index, std::complex<Real>> acc;
    const std::complex<Real> i(0, 1);
    auto add = [&](Index r, Index c, std::complex<Real> v) { acc[c * cutoff_ + r] += v; };
    // -i H_eff |m><n|
    for (typename Sparse::InnerIterator it(h_dyad_, m); it; ++it) add(it.row(), n, -i * it.value());
    // +i |m><n| H_eff^dagger = +i |m> (H_eff |n>)^dagger
    for (typename Sparse::InnerIterator it(h_dyad_, n); it; ++it) add(m, it.row(), i * std::conj(it.value()));
    for (const auto& l : diagonal_jumps_) {
      const std::complex<Real> lm = l(m);
      const std::complex<Real> ln = l(n);
      add(m, n, lm * std::conj(ln) - (lm * std::conj(lm) + ln * std::conj(ln)) / Real(2));
    }
    for (const auto& l : offdiag_jumps_) {
      for (typename Sparse::InnerIterator a(l, m); a; ++a) {
        for (typename Sparse::InnerIterator b(l, n); b; ++b) add(a.row(), b.row(), a.value() * std::conj(b.value()));
      }
    }
    std::vector<Entry> out;
    out.reserve(acc.size());
    for (const auto& [key, value] : acc) {
      if (value != std::complex<Real>(0)) out.push_back({key % cutoff_, key / cutoff_, value});
    }
    std::sort(out.begin(), out.end(), [](const Entry& x, const Entry& y) {
      return x.col != y.col ? x.col < y.col : x.row < y.row;
    });
    return out;
  }

  /// L(u v^dagger) for vectors u, v, as a dense matrix.
  Operator<Real> apply_rank_one(const ComplexVector<Real>& u, const ComplexVector<Real>& v) const {
    const std::complex<Real> i(0, 1);
    const ComplexVector<Real> hu = h_eff_ * u;
    const ComplexVector<Real> hv = h_eff_ * v;
    Operator<Real> out = -i * (hu * v.adjoint() - u * hv.adjoint());
    for (const auto& l : jumps_) {
      const ComplexVector<Real> lu = l * u;
      const ComplexVector<Real> lv = l * v;
      out.noalias() += lu * lv.adjoint();
    }
    return out;
  }

  /// Largest entry magnitude among the generator's building blocks.
  Real scale() const {
    Real s = Real(0);
    for (Index k = 0; k < h_eff_.outerSize(); ++k)
      for (typename Sparse::InnerIterator it(h_eff_, k); it; ++it) s = std::max(s, std::abs(it.value()));
    for (const auto& l : jumps_)
      for (Index k = 0; k < l.outerSize(); ++k)
        for (typename Sparse::InnerIterator it(l, k); it; ++it) s = std::max(s, std::norm(it.value()));
    return s;
  }

 private:
  Index cutoff_;
  Sparse h_eff_;
  Sparse h_eff_adj_;
  std::vector<Sparse> jumps_;
  std::vector<Sparse> jumps_adj_;
  Sparse h_dyad_;
  std::vector<ComplexVector<Real>> diagonal_jumps_;
  std::vector<Sparse> offdiag_jumps_;
};

using GeneratorXcd = Generator<double>;

}  // namespace dptlab
