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

#include "dptlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>

#include "dptlab/parallel.hpp"

namespace dptlab {

bool spectral_less(const cdouble& a, const cdouble& b) {
  constexpr double quantum = 1e-9;
  const double qa = std::round(a.real() / quantum);
  const double qb = std::round(b.real() / quantum);
  if (std::abs(qa) != std::abs(qb)) return std::abs(qa) < std::abs(qb);
  if (qa != qb) return qa > qb;
  return a.imag() < b.imag();
}

Eigen::VectorXd balance(OperatorXcd& matrix) {
  constexpr double radix = 2.0;
  constexpr double radix_sq = radix * radix;
  const Index n = matrix.rows();
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(n);
  bool done = false;
  while (!done) {
    done = true;
    for (Index i = 0; i < n; ++i) {
      double c = 0.0;
      double r = 0.0;
      for (Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(matrix(j, i));
        r += std::abs(matrix(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= radix_sq;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= radix_sq;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        scale(i) *= f;
        matrix.row(i) /= f;
        matrix.col(i) *= f;
      }
    }
  }
  return scale;
}

namespace {

Eigen::ComplexEigenSolver<OperatorXcd> solve_balanced(const OperatorXcd& matrix, bool vectors,
                                                      Eigen::VectorXd& scale) {
  OperatorXcd balanced = matrix;
  scale = balance(balanced);
  Eigen::ComplexEigenSolver<OperatorXcd> es(balanced, vectors);
  if (es.info() != Eigen::Success) {
    std::ostringstream os;
    os << "eigensolver did not converge (dim " << matrix.rows() << ", max |entry| " << max_abs(matrix)
       << ", balanced max |entry| " << max_abs(balanced) << ", scaling range " << scale.minCoeff() << ".."
       << scale.maxCoeff() << ")";
    throw NumericalError(os.str());
  }
  return es;
}

std::vector<Index> spectral_order(const VectorXcd& values) {
  std::vector<Index> idx(static_cast<std::size_t>(values.size()));
  std::iota(idx.begin(), idx.end(), Index(0));
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) { return spectral_less(values(a), values(b)); });
  return idx;
}

}  // namespace

namespace {

/// Eigenvalues of a real tridiagonal matrix whose off-diagonal products are nonnegative, via the
/// symmetric matrix it is diagonally similar to. Empty when the matrix has another shape.
std::optional<Eigen::VectorXd> symmetrizable_tridiagonal_eigenvalues(const OperatorXcd& matrix) {
  const Index n = matrix.rows();
  if (n < 3 || matrix.imag().cwiseAbs().maxCoeff() != 0.0) return std::nullopt;
  const Eigen::MatrixXd re = matrix.real();
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i)
      if (std::abs(i - j) > 1 && re(i, j) != 0.0) return std::nullopt;
  Eigen::VectorXd off(n - 1);
  for (Index i = 0; i + 1 < n; ++i) {
    const double product = re(i + 1, i) * re(i, i + 1);
    if (product < 0.0) return std::nullopt;
    off(i) = std::sqrt(product);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(re.diagonal(), off, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) return std::nullopt;
  return es.eigenvalues();
}

}  // namespace

std::vector<cdouble> eigenvalues(const OperatorXcd& matrix) {
  if (matrix.rows() != matrix.cols()) throw DimensionMismatch("eigenvalues of a non-square matrix");
  if (matrix.size() == 0) return {};
  if (const auto real = symmetrizable_tridiagonal_eigenvalues(matrix)) {
    std::vector<cdouble> out(real->begin(), real->end());
    std::stable_sort(out.begin(), out.end(), spectral_less);
    return out;
  }
  Eigen::VectorXd scale;
  const auto es = solve_balanced(matrix, false, scale);
  std::vector<cdouble> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::stable_sort(out.begin(), out.end(), spectral_less);
  return out;
}

std::vector<cdouble> full_spectrum(const SuperoperatorMatrix<double>& superop) { return eigenvalues(superop.entries); }

double multiset_deviation(std::vector<cdouble> a, std::vector<cdouble> b) {
  if (a.size() != b.size()) {
    throw DimensionMismatch("multisets differ in size: " + std::to_string(a.size()) + " vs " +
                            std::to_string(b.size()));
  }
  std::stable_sort(a.begin(), a.end(), spectral_less);
  std::vector<bool> used(b.size(), false);
  double worst = 0.0;
  for (const auto& x : a) {
    std::size_t best = b.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(x - b[j]);
      if (d < best_dist) {
        best_dist = d;
        best = j;
      }
    }
    used[best] = true;
    worst = std::max(worst, best_dist);
  }
  return worst;
}

std::vector<cdouble> SpectrumResult::values() const {
  std::vector<cdouble> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.lambda);
  return out;
}

SpectrumResult sector_spectrum(const SectorMatrix<double>& block, Index count, bool with_eigenmatrices) {
  const Index dim = block.dim();
  if (count < 0 || count > dim) {
    throw InvalidArgument("requested " + std::to_string(count) + " eigenpairs from a block of dimension " +
                          std::to_string(dim));
  }
  SpectrumResult result{block.sector, {}, 0.0};
  if (dim == 0 || count == 0) return result;
  Eigen::VectorXd scale;
  const auto es = solve_balanced(block.entries, with_eigenmatrices, scale);
  const auto order = spectral_order(es.eigenvalues());
  const double bound = 1e-8 * std::max(1.0, max_abs(block.entries)) * static_cast<double>(dim);
  for (Index i = 0; i < count; ++i) {
    const Index idx = order[static_cast<std::size_t>(i)];
    EigenPair pair{es.eigenvalues()(idx), {}};
    if (with_eigenmatrices) {
      VectorXcd v = scale.asDiagonal() * es.eigenvectors().col(idx);
      v /= v.norm();
      Index big = 0;
      v.cwiseAbs().maxCoeff(&big);
      v *= std::conj(v(big)) / std::abs(v(big));
      v(big) = std::abs(v(big));
      const double residual = (block.entries * v - pair.lambda * v).norm();
      result.max_residual = std::max(result.max_residual, residual);
      if (residual > bound) {
        std::ostringstream os;
        os << "eigenpair residual " << residual << " exceeds " << bound << " in sector " << block.sector.label()
           << " (lambda = " << pair.lambda << ")";
        throw NumericalError(os.str());
      }
      pair.eigenmatrix = from_sector_vector<double>(v, block.sector);
    }
    result.pairs.push_back(std::move(pair));
  }
  return result;
}

DensityMatrixXcd steady_state(const SectorMatrix<double>& block, const SteadyStateOptions& options) {
  if (block.sector.k != 0) throw InvalidArgument("steady state requires the k = 0 sector, got " + block.sector.label());
  const Index dim = block.dim();
  const OperatorXcd& b = block.entries;
  if (options.check_degeneracy) {
    // Singular values of the balanced block.
    OperatorXcd balanced = b;
    balance(balanced);
    Eigen::BDCSVD<OperatorXcd> svd(balanced);
    const auto& sv = svd.singularValues();
    const double threshold = options.gap_floor * sv.maxCoeff();
    const long nullity =
        sv.maxCoeff() > 0.0 ? static_cast<long>((sv.array() < threshold).count()) : static_cast<long>(dim);
    if (nullity > 1) {
      throw DegenerateSteadyState("steady state is degenerate: null-space dimension " + std::to_string(nullity) +
                                      " at gap floor " + std::to_string(options.gap_floor),
                                  nullity);
    }
  }
  OperatorXcd bordered = b;
  for (Index j = 0; j < dim; ++j) {
    const auto [m, n] = block.dyad(j);
    bordered(0, j) = (m == n) ? 1.0 : 0.0;
  }
  VectorXcd rhs = VectorXcd::Zero(dim);
  rhs(0) = 1.0;
  Eigen::PartialPivLU<OperatorXcd> lu(bordered);
  if (!(lu.rcond() > 1e-15)) {
    throw NormalizationError("bordered steady-state system is singular: the null vector has vanishing trace");
  }
  const VectorXcd x = lu.solve(rhs);
  const double residual = max_abs(VectorXcd(b * x));
  if (residual > options.residual_tolerance * std::max(1.0, max_abs(b))) {
    std::ostringstream os;
    os << "steady-state residual " << residual << " above tolerance";
    throw NumericalError(os.str());
  }
  OperatorXcd rho = from_sector_vector<double>(x, block.sector);
  rho = (rho + rho.adjoint()).eval() / 2.0;
  rho /= rho.trace().real();
  return DensityMatrixXcd(std::move(rho));
}

DensityMatrixXcd steady_state(const LindbladModelXcd& model, const SteadyStateOptions& options) {
  return steady_state(sector_liouvillian(model, symmetric_sector(model.symmetry(), model.cutoff())), options);
}

cdouble slowest_rate(const SectorMatrix<double>& block) {
  const auto values = eigenvalues(block.entries);
  if (values.empty()) throw InvalidArgument("empty sector block");
  if (block.sector.k == 0) {
    if (values.size() < 2) throw InvalidArgument("k = 0 sector has no decaying mode");
    return values[1];
  }
  return values[0];
}

namespace {

SymmetrySector sector_for(const LindbladModelXcd& model, int k) {
  switch (model.symmetry()) {
    case SymmetryKind::U1: return u1_sector(model.cutoff(), k);
    case SymmetryKind::Z2: return z2_sector(model.cutoff(), k);
    case SymmetryKind::None:
      if (k != 0) throw InvalidArgument("a model without symmetry has only sector 0");
      return symmetric_sector(SymmetryKind::None, model.cutoff());
  }
  throw InvalidArgument("unknown symmetry");
}

}  // namespace

GapTrace gap_trace(const ModelFamily& family, const std::vector<double>& grid, const std::vector<int>& sectors,
                   const GapTraceOptions& options) {
  if (grid.empty()) throw InvalidArgument("gap trace needs a nonempty grid");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw InvalidArgument("gap trace grid must be strictly increasing");
  const auto rows = parallel_map(grid.size(), options.workers, [&](std::size_t g) {
    const LindbladModelXcd model = family(grid[g]);
    const Generator<double> gen(model);
    std::vector<cdouble> out;
    for (int k : sectors) out.push_back(slowest_rate(sector_liouvillian(gen, sector_for(model, k))));
    return out;
  });
  GapTrace trace{options.parameter, grid, options.scaling_n, sectors, {}};
  trace.slowest.assign(sectors.size(), std::vector<cdouble>(grid.size()));
  for (std::size_t g = 0; g < grid.size(); ++g)
    for (std::size_t s = 0; s < sectors.size(); ++s) trace.slowest[s][g] = rows[g][s];
  return trace;
}

namespace {

double min_hermitian_eigenvalue(const OperatorXcd& m) {
  Eigen::SelfAdjointEigenSolver<OperatorXcd> es(OperatorXcd((m + m.adjoint()) / 2.0), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

BrokenSteadyState broken_steady_states(const DensityMatrixXcd& rho0, const OperatorXcd& eigenmatrix, double c) {
  require_operator(eigenmatrix, rho0.cutoff(), "eigenmatrix");
  const OperatorXcd herm = eigenmatrix + eigenmatrix.adjoint();
  const double tol = rho0.tolerance();
  auto build = [&](double coeff) {
    OperatorXcd x = rho0.matrix() + coeff * herm;
    const double tr = x.trace().real();
    if (std::abs(tr) < 1e-12) throw NormalizationError("broken-symmetry state has vanishing trace");
    x /= tr;
    return OperatorXcd((x + x.adjoint()) / 2.0);
  };
  OperatorXcd candidate = build(c);
  if (min_hermitian_eigenvalue(candidate) >= -tol) return {DensityMatrixXcd(std::move(candidate), tol), c, false};
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (min_hermitian_eigenvalue(build(c * mid)) >= -tol) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {DensityMatrixXcd(build(c * lo), tol), c * lo, true};
}

CriticalityWitness second_derivative_peak(const std::vector<double>& grid, const std::vector<double>& values) {
  if (grid.size() < 5) throw InvalidArgument("criticality witness needs at least 5 grid points");
  if (values.size() != grid.size()) throw DimensionMismatch("grid and values differ in length");
  const double h = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
  if (!(h > 0.0)) throw InvalidArgument("grid must be increasing");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (std::abs((grid[i] - grid[i - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h))) {
      throw InvalidArgument("criticality witness needs a uniform grid");
    }
  }
  CriticalityWitness w{grid, values, {}, h, 0.0, 0.0};
  double best = -1.0;
  for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
    const double d2 = (values[i + 1] - 2.0 * values[i] + values[i - 1]) / (h * h);
    w.second_derivative.push_back(d2);
    if (std::abs(d2) > best) {
      best = std::abs(d2);
      w.peak_location = grid[i];
      w.peak_value = d2;
    }
  }
  return w;
}

CriticalityWitness criticality_witness(const ModelFamily& family, const std::vector<double>& grid,
                                       const ObservableFactory& observable, std::size_t workers,
                                       const SteadyStateOptions& options) {
  if (grid.size() < 5) throw InvalidArgument("criticality witness needs at least 5 grid points");
  const auto values = parallel_map(grid.size(), workers, [&](std::size_t i) {
    const LindbladModelXcd model = family(grid[i]);
    const DensityMatrixXcd rho = steady_state(model, options);
    return expectation(rho, observable(model.cutoff())).real();
  });
  return second_derivative_peak(grid, values);
}

}  // namespace dptlab
