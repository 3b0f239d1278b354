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

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dptlab/integrator.hpp"
#include "dptlab/symmetry.hpp"

namespace dptlab {

struct NamedObservable {
  std::string name;
  OperatorXcd op;
};

/// {n: a^dagger a, a: a, a2: a^2}.
std::vector<NamedObservable> default_observables(Index cutoff);

struct EvolveOptions {
  IntegratorOptions integrator;
  /// Population allowed in the top 10% of Fock levels at any record; negative disables the guard.
  double truncation_threshold = 1e-6;
  /// Minimum-eigenvalue check on recorded states (one Hermitian eigensolve per record).
  bool check_positivity = true;
  /// Keep the density matrix at every record.
  bool keep_states = false;
};

struct StateIntegrity {
  double max_trace_deviation = 0.0;
  double max_hermiticity_deviation = 0.0;
  /// +inf when positivity is not checked.
  double min_eigenvalue = std::numeric_limits<double>::infinity();
};

struct EvolutionTrace {
  std::vector<double> times;
  std::map<std::string, std::vector<cdouble>> observables;
  /// Absent for sector-wise runs that discard bands (the truncated matrix need not be positive).
  std::optional<DensityMatrixXcd> final_state;
  OperatorXcd final_matrix;
  std::vector<OperatorXcd> states;
  StateIntegrity integrity;
  IntegratorStats stats;
};

/// n_records >= 2 uniformly spaced times from 0 to t_final.
std::vector<double> record_times(double t_final, Index n_records);

/// Integrates d rho / dt = L rho from rho0.
EvolutionTrace evolve(const LindbladModelXcd& model, const DensityMatrixXcd& rho0, double t_final,
                      const std::vector<NamedObservable>& observables, Index n_records,
                      const EvolveOptions& options = {});

/// Same, recording at explicit times: strictly increasing, starting at 0.
EvolutionTrace evolve(const LindbladModelXcd& model, const DensityMatrixXcd& rho0, const std::vector<double>& times,
                      const std::vector<NamedObservable>& observables, const EvolveOptions& options = {});

/// Evolves U1 diagonal bands |k| <= kmax independently under their sector blocks and reassembles.
EvolutionTrace evolve_sectorwise(const LindbladModelXcd& model, const DensityMatrixXcd& rho0, double t_final,
                                 Index kmax, const std::vector<NamedObservable>& observables, Index n_records,
                                 const EvolveOptions& options = {});

EvolutionTrace evolve_sectorwise(const LindbladModelXcd& model, const DensityMatrixXcd& rho0,
                                 const std::vector<double>& times, Index kmax,
                                 const std::vector<NamedObservable>& observables, const EvolveOptions& options = {});

struct WignerGridSpec {
  double re_min = -4.0;
  double re_max = 4.0;
  Index re_points = 41;
  double im_min = -4.0;
  double im_max = 4.0;
  Index im_points = 41;
};

struct WignerGrid {
  Eigen::VectorXd re_alpha;
  Eigen::VectorXd im_alpha;
  /// values(i, j) = W(re_alpha[i] + i im_alpha[j]).
  Eigen::MatrixXd values;
  double max_imag_residue = 0.0;

  double cell_area() const;
  /// Riemann sum of W times the cell area.
  double normalization() const;
};

/// W(alpha) = (2/pi) Tr[D(alpha) P D(alpha)^dagger rho] on a grid, with untruncated displacement elements
/// cached per grid point when they fit in an eighth of the memory budget.
class WignerEvaluator {
 public:
  WignerEvaluator(const WignerGridSpec& spec, Index cutoff, std::size_t workers = 1);

  WignerGrid operator()(const DensityMatrixXcd& rho) const;
  Index cutoff() const noexcept { return cutoff_; }
  bool caches_displacements() const noexcept { return !displacements_.empty(); }

 private:
  OperatorXcd displaced_parity(Index i, Index j) const;

  WignerGridSpec spec_;
  Index cutoff_;
  std::size_t workers_;
  Eigen::VectorXd re_;
  Eigen::VectorXd im_;
  std::vector<OperatorXcd> displacements_;
};

WignerGrid wigner(const DensityMatrixXcd& rho, const WignerGridSpec& spec, std::size_t workers = 1);

/// Tr[a^n rho_k] for each (k, rho_k) sector projection.
std::vector<cdouble> sector_selection_rule_check(const std::vector<std::pair<int, OperatorXcd>>& projections, int n);

}  // namespace dptlab
