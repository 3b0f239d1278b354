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

#include "dptlab/models.hpp"

#include <cmath>
#include <sstream>

#include "dptlab/memory.hpp"

namespace dptlab {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw InvalidArgument(message);
}

}  // namespace

void LaserConfig::validate() const {
  require(std::isfinite(A) && A > 0.0, "laser gain A must be positive");
  require(std::isfinite(B) && B > 0.0, "laser saturation B must be positive");
  require(std::isfinite(N) && N > 0.0, "scaling parameter N must be positive");
  require(std::isfinite(eta) && eta >= 0.0, "dephasing rate eta must be nonnegative");
  require(std::isfinite(omega), "cavity frequency omega must be finite");
  require_cutoff<double>(cutoff);
}

void KerrConfig::validate() const {
  require(std::isfinite(G) && G > 0.0, "two-photon drive G must be positive");
  require(std::isfinite(U) && U > 0.0, "Kerr interaction U must be positive");
  require(std::isfinite(N) && N > 0.0, "scaling parameter N must be positive");
  require(std::isfinite(zeta) && zeta >= 0.0, "parity-jump rate zeta must be nonnegative");
  require(std::isfinite(Delta), "detuning Delta must be finite");
  require_cutoff<double>(cutoff);
}

OperatorXcd dephasing_jump(double eta, Index cutoff) {
  return std::sqrt(eta / 4.0) * anti_normal_number(cutoff);
}

OperatorXcd parity_jump(double zeta, Index cutoff) { return std::sqrt(zeta) * parity(cutoff); }

LindbladModelXcd laser_model(const LaserConfig& cfg) {
  cfg.validate();
  const Index c = cfg.cutoff;
  const double b = cfg.B / cfg.N;
  const OperatorXcd a = annihilation(c);
  const OperatorXcd aad = anti_normal_number(c);
  const OperatorXcd id = OperatorXcd::Identity(c, c);
  std::vector<OperatorXcd> jumps;
  jumps.push_back(a.adjoint() * (2.0 * cfg.A * id - b * aad) / (2.0 * std::sqrt(cfg.A)));
  jumps.push_back(std::sqrt(3.0 * b / 4.0) * aad);
  jumps.push_back(a);
  if (cfg.eta > 0.0) jumps.push_back(dephasing_jump(cfg.eta, c));
  return LindbladModelXcd(cfg.omega * number(c), std::move(jumps), SymmetryKind::U1);
}

LindbladModelXcd kerr_model(const KerrConfig& cfg) {
  cfg.validate();
  const Index c = cfg.cutoff;
  const OperatorXcd a = annihilation(c);
  const OperatorXcd ad = a.adjoint();
  const OperatorXcd a2 = a * a;
  const OperatorXcd ad2 = ad * ad;
  const cdouble i(0.0, 1.0);
  OperatorXcd h = -cfg.Delta * number(c) + i * (cfg.G / 2.0) * (ad2 - a2) + (cfg.U / cfg.N / 2.0) * (ad2 * a2);
  h = (h + h.adjoint()).eval() / 2.0;
  std::vector<OperatorXcd> jumps{a};
  if (cfg.zeta > 0.0) jumps.push_back(parity_jump(cfg.zeta, c));
  return LindbladModelXcd(std::move(h), std::move(jumps), SymmetryKind::Z2);
}

double laser_photon_estimate(const LaserConfig& cfg) { return std::max(0.0, cfg.N * (cfg.A - 1.0) / cfg.B); }

double kerr_photon_estimate(const KerrConfig& cfg) {
  const double threshold = cfg.G * cfg.G - 0.25;
  if (threshold <= 0.0) return 0.0;
  return std::max(0.0, cfg.N * (cfg.Delta + std::sqrt(threshold)) / cfg.U);
}

double laser_validity_ratio(const LaserConfig& cfg, double photons) {
  return (cfg.B / cfg.N) * (photons + 1.0) / (2.0 * cfg.A);
}

double check_laser_validity(const LaserConfig& cfg, double photons) {
  const double ratio = laser_validity_ratio(cfg, photons);
  if (ratio > 0.1) {
    std::ostringstream os;
    os << "weak-gain expansion questionable: B'(<n>+1)/(2A) = " << ratio << " > 0.1 at A = " << cfg.A;
    warn(os.str());
  }
  return ratio;
}

LaserConfig laser_fig1_preset() {
  LaserConfig cfg;
  cfg.A = 1.25;
  cfg.B = 0.1;
  cfg.omega = 0.0;
  cfg.eta = 0.0;
  cfg.N = 10.0;
  cfg.cutoff = 100;
  return cfg;
}

KerrConfig kerr_fig2_preset() {
  KerrConfig cfg;
  cfg.Delta = 10.0;
  cfg.U = 10.0;
  cfg.G = 12.5;
  cfg.zeta = 0.0;
  cfg.N = 3.0;
  cfg.cutoff = 30;
  return cfg;
}

std::vector<std::string> preset_names() { return {"laser-fig1", "kerr-fig2"}; }

std::vector<Index> cutoff_schedule(const CutoffSchedule& schedule) {
  if (schedule.start < 2) throw InvalidCutoff("cutoff schedule must start at 2 or above");
  if (!(schedule.growth > 1.0)) throw InvalidArgument("cutoff schedule growth must exceed 1");
  std::vector<Index> out;
  double c = static_cast<double>(schedule.start);
  while (std::lround(c) <= schedule.max_cutoff) {
    const Index next = static_cast<Index>(std::lround(c));
    if (out.empty() || next > out.back()) out.push_back(next);
    c *= schedule.growth;
  }
  return out;
}

CutoffSuggestion suggest_cutoff(const std::function<double(Index)>& observable_at, double tol,
                                const CutoffSchedule& schedule, const std::function<Index(Index)>& dense_dim) {
  if (!(tol > 0.0)) throw InvalidArgument("cutoff tolerance must be positive");
  CutoffSuggestion result;
  std::optional<double> previous;
  for (Index c : cutoff_schedule(schedule)) {
    if (static_cast<double>(c) < schedule.seed) continue;
    if (dense_dim) {
      const Index dim = dense_dim(c);
      try {
        require_dense_allocation(dim, dim, "cutoff schedule");
      } catch (const MemoryBoundExceeded& e) {
        throw NonConvergence(std::string("cutoff schedule exhausted at the memory bound: ") + e.what());
      }
    }
    const double value = observable_at(c);
    result.table.push_back({c, value});
    if (previous) {
      const double denom = std::max(std::abs(value), schedule.absolute_floor);
      if (std::abs(value - *previous) < tol * denom || value == *previous) {
        result.cutoff = c;
        return result;
      }
    }
    previous = value;
  }
  std::ostringstream os;
  os << "cutoff schedule exhausted at C = " << schedule.max_cutoff << " without reaching relative tolerance " << tol;
  throw NonConvergence(os.str());
}

namespace {

Index sector_zero_dim(SymmetryKind kind, Index c) {
  switch (kind) {
    case SymmetryKind::U1: return c;
    case SymmetryKind::Z2: return (c * c + 1) / 2;
    case SymmetryKind::None: return c * c;
  }
  return c * c;
}

}  // namespace

CutoffSuggestion suggest_cutoff(const std::function<LindbladModelXcd(Index)>& builder,
                                const ObservableFactory& observable, double tol, const CutoffSchedule& schedule) {
  std::optional<SymmetryKind> kind;
  return suggest_cutoff(
      [&](Index c) {
        const LindbladModelXcd model = builder(c);
        kind = model.symmetry();
        return expectation(steady_state(model), observable(c)).real();
      },
      tol, schedule, [&](Index c) { return sector_zero_dim(kind.value_or(SymmetryKind::U1), c); });
}

CutoffSuggestion suggest_laser_cutoff(LaserConfig cfg, double tol) {
  CutoffSchedule schedule;
  schedule.seed = laser_photon_estimate(cfg);
  auto builder = [&](Index c) {
    LaserConfig local = cfg;
    local.cutoff = c;
    return laser_model(local);
  };
  return suggest_cutoff(builder, [](Index c) { return number(c); }, tol, schedule);
}

CutoffSuggestion suggest_kerr_cutoff(KerrConfig cfg, double tol) {
  CutoffSchedule schedule;
  schedule.seed = kerr_photon_estimate(cfg);
  auto builder = [&](Index c) {
    KerrConfig local = cfg;
    local.cutoff = c;
    return kerr_model(local);
  };
  return suggest_cutoff(builder, [](Index c) { return number(c); }, tol, schedule);
}

}  // namespace dptlab
