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
#include <string>
#include <vector>

#include "dptlab/symmetry.hpp"

namespace dptlab {

/// Ascending |Re|, ties by descending Re, then ascending Im. Real parts are compared on a 1e-9 grid.
bool spectral_less(const cdouble& a, const cdouble& b);

/// In-place diagonal similarity scaling by powers of two (Parlett-Reinsch).
/// Returns d such that the balanced matrix is D^-1 A D with D = diag(d).
Eigen::VectorXd balance(OperatorXcd& matrix);

/// All eigenvalues of a dense matrix in spectral order. Real tridiagonal matrices with nonnegative
/// off-diagonal products go through their symmetrized form; everything else is balanced first.
std::vector<cdouble> eigenvalues(const OperatorXcd& matrix);

/// Eigenvalues of the full vectorized generator, in spectral order.
std::vector<cdouble> full_spectrum(const SuperoperatorMatrix<double>& superop);

/// Largest pairwise deviation after greedy nearest matching of two equal-size multisets.
double multiset_deviation(std::vector<cdouble> a, std::vector<cdouble> b);

struct EigenPair {
  cdouble lambda;
  /// Unit Frobenius norm, largest-magnitude entry real and positive. Empty when not requested.
  OperatorXcd eigenmatrix;
};

struct SpectrumResult {
  SymmetrySector sector;
  std::vector<EigenPair> pairs;
  /// max ||B v - lambda v|| over returned pairs with eigenvectors.
  double max_residual = 0.0;

  std::vector<cdouble> values() const;
};

/// The `count` slowest eigenpairs of a sector block.
SpectrumResult sector_spectrum(const SectorMatrix<double>& block, Index count, bool with_eigenmatrices = true);

struct SteadyStateOptions {
  /// Singular values below gap_floor * sigma_max count toward the null space.
  double gap_floor = 1e-10;
  double residual_tolerance = 1e-10;
  bool check_degeneracy = true;
};

/// Unit-trace null vector of a k = 0 sector block, by a bordered linear solve.
DensityMatrixXcd steady_state(const SectorMatrix<double>& block, const SteadyStateOptions& options = {});

/// Builds the model's k = 0 sector and solves for its steady state.
DensityMatrixXcd steady_state(const LindbladModelXcd& model, const SteadyStateOptions& options = {});

/// Slowest relevant rate of a sector: lambda_1 for k = 0 (lambda_0 is the steady state), lambda_0 otherwise.
cdouble slowest_rate(const SectorMatrix<double>& block);

using ModelFamily = std::function<LindbladModelXcd(double)>;
using ObservableFactory = std::function<OperatorXcd(Index cutoff)>;

struct GapTrace {
  std::string parameter;
  std::vector<double> grid;
  double scaling_n = 1.0;
  std::vector<int> sectors;
  /// slowest[s][g]: slowest_rate of sectors[s] at grid[g].
  std::vector<std::vector<cdouble>> slowest;
};

struct GapTraceOptions {
  std::string parameter = "A";
  double scaling_n = 1.0;
  std::size_t workers = 1;
};

/// Slowest rate per sector along a parameter grid. Sector labels refer to the model's own symmetry group.
GapTrace gap_trace(const ModelFamily& family, const std::vector<double>& grid, const std::vector<int>& sectors,
                   const GapTraceOptions& options = {});

struct BrokenSteadyState {
  DensityMatrixXcd state;
  double c_used = 0.0;
  bool clipped = false;
};

/// rho0 + c (E + E^dagger), renormalized; c shrinks toward 0 until the state is positive.
BrokenSteadyState broken_steady_states(const DensityMatrixXcd& rho0, const OperatorXcd& eigenmatrix, double c);

struct CriticalityWitness {
  /// Full grid and observable values.
  std::vector<double> grid;
  std::vector<double> values;
  /// Central second differences at grid[1..n-2].
  std::vector<double> second_derivative;
  double spacing = 0.0;
  double peak_location = 0.0;
  double peak_value = 0.0;
};

/// Second central differences of `values` on a uniform grid (>= 5 points) and the location of max |d2|.
CriticalityWitness second_derivative_peak(const std::vector<double>& grid, const std::vector<double>& values);

/// Steady-state <observable> along `grid`, then second_derivative_peak.
CriticalityWitness criticality_witness(const ModelFamily& family, const std::vector<double>& grid,
                                       const ObservableFactory& observable, std::size_t workers = 1,
                                       const SteadyStateOptions& options = {});

}  // namespace dptlab
