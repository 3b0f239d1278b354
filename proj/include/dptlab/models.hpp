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
#include <optional>
#include <string>
#include <vector>

#include "dptlab/spectral.hpp"

namespace dptlab {

/// Weak-gain laser. Rates in units of the loss rate Gamma = 1; B enters as B / N.
struct LaserConfig {
  double A = 1.0;
  double B = 0.1;
  double omega = 0.0;
  double eta = 0.0;
  double N = 1.0;
  Index cutoff = 40;

  void validate() const;
};

/// Two-photon driven Kerr resonator. U enters as U / N.
struct KerrConfig {
  double Delta = 10.0;
  double G = 3.0;
  double U = 10.0;
  double zeta = 0.0;
  double N = 1.0;
  Index cutoff = 30;

  void validate() const;
};

/// H = omega a^dagger a; L1 = a^dagger (2A - B' a a^dagger) / (2 sqrt A), L2 = sqrt(3B'/4) a a^dagger,
/// L3 = a, plus sqrt(eta/4) a a^dagger when eta > 0; B' = B / N.
LindbladModelXcd laser_model(const LaserConfig& cfg);

/// H = -Delta a^dagger a + i G/2 (a^dagger^2 - a^2) + U'/2 a^dagger^2 a^2 with U' = U / N; L = a,
/// plus sqrt(zeta) P when zeta > 0.
LindbladModelXcd kerr_model(const KerrConfig& cfg);

/// sqrt(eta/4) a a^dagger: removes U1 symmetry breaking without touching sector 0.
OperatorXcd dephasing_jump(double eta, Index cutoff);

/// sqrt(zeta) exp(i pi a^dagger a).
OperatorXcd parity_jump(double zeta, Index cutoff);

/// Gain-loss balance estimate N (A - 1) / B, floored at 0.
double laser_photon_estimate(const LaserConfig& cfg);

/// Upper-branch estimate N (Delta + sqrt(G^2 - 1/4)) / U, floored at 0.
double kerr_photon_estimate(const KerrConfig& cfg);

/// B' (n + 1) / (2A); the weak-gain expansion wants this well below 1.
double laser_validity_ratio(const LaserConfig& cfg, double photons);

/// Warns when laser_validity_ratio exceeds 0.1. Returns the ratio.
double check_laser_validity(const LaserConfig& cfg, double photons);

LaserConfig laser_fig1_preset();
KerrConfig kerr_fig2_preset();
std::vector<std::string> preset_names();

struct CutoffRow {
  Index cutoff = 0;
  double value = 0.0;
};

struct CutoffSuggestion {
  Index cutoff = 0;
  std::vector<CutoffRow> table;
};

struct CutoffSchedule {
  Index start = 10;
  double growth = 1.5;
  /// Schedule entries below the seed are skipped.
  double seed = 0.0;
  Index max_cutoff = 4000;
  /// Values smaller than this converge in absolute rather than relative terms.
  double absolute_floor = 1e-3;
};

/// 10, 15, 22, 34, ... up to max_cutoff.
std::vector<Index> cutoff_schedule(const CutoffSchedule& schedule);

/// Walks the schedule until |obs(C') - obs(C)| / |obs(C')| < tol for consecutive entries and returns C'.
/// `dense_dim(C)` gives the dense block dimension needed at C, checked against the memory bound.
CutoffSuggestion suggest_cutoff(const std::function<double(Index)>& observable_at, double tol,
                                const CutoffSchedule& schedule = {},
                                const std::function<Index(Index)>& dense_dim = {});

/// suggest_cutoff on the steady-state expectation of `observable` for models built by `builder`.
CutoffSuggestion suggest_cutoff(const std::function<LindbladModelXcd(Index)>& builder,
                                const ObservableFactory& observable, double tol, const CutoffSchedule& schedule = {});

/// Converged cutoff for the laser's steady-state photon number, seeded by laser_photon_estimate.
CutoffSuggestion suggest_laser_cutoff(LaserConfig cfg, double tol = 1e-10);

/// Converged cutoff for the Kerr steady-state photon number, seeded by kerr_photon_estimate.
CutoffSuggestion suggest_kerr_cutoff(KerrConfig cfg, double tol = 1e-8);

}  // namespace dptlab
