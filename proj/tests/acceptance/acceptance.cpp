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

// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion ids as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dptlab/dynamics.hpp"
#include "dptlab/models.hpp"
#include "dptlab/spectral.hpp"
#include "dptlab/symmetry.hpp"

namespace {

using namespace dptlab;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

LaserConfig laser(double a, double n, double eta, Index cutoff = 10) {
  LaserConfig c;
  c.A = a;
  c.B = 0.1;
  c.N = n;
  c.eta = eta;
  c.cutoff = cutoff;
  return c;
}

Index laser_cutoff(double a, double n) { return suggest_laser_cutoff(laser(a, n, 0.0)).cutoff; }

double photons(const DensityMatrixXcd& rho) { return expectation(rho, number(rho.cutoff())).real(); }

double steady_photons_per_n(double a, double n, double eta, Index cutoff) {
  return photons(steady_state(laser_model(laser(a, n, eta, cutoff)))) / n;
}

std::vector<cdouble> sector_eigenvalues(const LindbladModelXcd& model, const SymmetrySector& s) {
  return eigenvalues(sector_liouvillian(Generator<double>(model), s).entries);
}

Outcome dephasing_independence() {
  double worst = 0.0;
  for (double n : {1.0, 2.0, 5.0})
    for (double a : {0.5, 1.0, 1.25, 2.0}) {
      const Index c = laser_cutoff(a, n);
      const double ref = steady_photons_per_n(a, n, 0.0, c);
      for (double eta : {0.2, 1.0}) {
        const double v = steady_photons_per_n(a, n, eta, c);
        worst = std::max(worst, std::abs(v - ref) / std::max(std::abs(ref), 1e-300));
      }
    }
  return {worst < 1e-10, "max relative spread " + num(worst) + " over 12 (N, A) points"};
}

Outcome elbow_sharpening() {
  std::vector<double> grid;
  for (int i = 1; i <= 40; ++i) grid.push_back(0.05 * i);
  std::vector<CriticalityWitness> peaks;
  std::ostringstream os;
  for (double n : {1.0, 2.0, 5.0, 10.0}) {
    std::vector<double> values;
    for (double a : grid) values.push_back(steady_photons_per_n(a, n, 0.0, laser_cutoff(a, n)));
    peaks.push_back(second_derivative_peak(grid, values));
    os << "N=" << n << ": max d2 " << num(peaks.back().peak_value) << " at A=" << num(peaks.back().peak_location)
       << "; ";
  }
  bool increasing = true;
  for (std::size_t i = 1; i < peaks.size(); ++i) increasing = increasing && peaks[i].peak_value > peaks[i - 1].peak_value;
  const double where = peaks.back().peak_location;
  const bool located = std::abs(where - 1.0) <= 0.1 + 1e-9;
  os << (increasing ? "strictly increasing" : "not increasing") << ", N=10 peak "
     << (located ? "within" : "outside") << " 1 +/- 0.1";
  return {increasing && located, os.str()};
}

/// D[L] on each dyad |m><m-k| by explicit operator products.
double dyad_shift_oracle(const OperatorXcd& jump, int k, double expected) {
  const Index c = jump.rows();
  double worst = 0.0;
  for (Index m = k; m < c; ++m) {
    OperatorXcd dyad = OperatorXcd::Zero(c, c);
    dyad(m, m - k) = 1.0;
    const OperatorXcd ldl = jump.adjoint() * jump;
    const OperatorXcd out = jump * dyad * jump.adjoint() - 0.5 * (ldl * dyad + dyad * ldl);
    worst = std::max(worst, (out - expected * dyad).cwiseAbs().maxCoeff());
  }
  return worst;
}

Outcome u1_shift_law() {
  const double eta = 0.2;
  const Index c = laser_cutoff(1.25, 5.0);
  const auto base = laser_model(laser(1.25, 5.0, 0.0, c));
  const auto dephased = laser_model(laser(1.25, 5.0, eta, c));
  double eig_dev = 0.0;
  double oracle_dev = 0.0;
  for (int k : {1, 2}) {
    const double shift = -eta * k * k / 8.0;
    const auto s = u1_sector(c, k);
    std::vector<cdouble> expected = sector_eigenvalues(base, s);
    for (auto& v : expected) v += shift;
    eig_dev = std::max(eig_dev, multiset_deviation(expected, sector_eigenvalues(dephased, s)));
    oracle_dev = std::max(oracle_dev, dyad_shift_oracle(dephasing_jump(eta, c), k, shift));
  }
  return {eig_dev < 1e-9 && oracle_dev < 1e-9,
          "C=" + std::to_string(c) + ", eigenvalue deviation " + num(eig_dev) + ", dyad oracle deviation " +
              num(oracle_dev)};
}

KerrConfig kerr_small(double zeta, Index cutoff) {
  KerrConfig k;
  k.Delta = 10.0;
  k.U = 10.0;
  k.G = 3.0;
  k.N = 3.0;
  k.zeta = zeta;
  k.cutoff = cutoff;
  return k;
}

Outcome z2_shift_law() {
  const Index c = 30;
  const double zeta = 0.2;
  const auto base = kerr_model(kerr_small(0.0, c));
  const auto jumped = kerr_model(kerr_small(zeta, c));
  std::vector<cdouble> expected = sector_eigenvalues(base, z2_sector(c, 1));
  for (auto& v : expected) v -= 2.0 * zeta;
  const double dev1 = multiset_deviation(expected, sector_eigenvalues(jumped, z2_sector(c, 1)));
  const double dev0 = multiset_deviation(sector_eigenvalues(base, z2_sector(c, 0)),
                                         sector_eigenvalues(jumped, z2_sector(c, 0)));
  const double drho = (steady_state(base).matrix() - steady_state(jumped).matrix()).cwiseAbs().maxCoeff();
  return {dev1 < 1e-9 && dev0 < 1e-10 && drho < 1e-10,
          "C=30, sector-1 deviation " + num(dev1) + ", sector-0 change " + num(dev0) + ", steady-state change " +
              num(drho)};
}

Outcome critical_slowing() {
  const double eta = 0.2;
  std::vector<double> bare, dephased;
  std::ostringstream os;
  for (double n : {1.0, 2.0, 5.0, 10.0, 20.0}) {
    const Index c = laser_cutoff(1.25, n);
    const auto s = u1_sector(c, 1);
    bare.push_back(std::abs(slowest_rate(sector_liouvillian(Generator<double>(laser_model(laser(1.25, n, 0.0, c))), s)).real()));
    dephased.push_back(
        std::abs(slowest_rate(sector_liouvillian(Generator<double>(laser_model(laser(1.25, n, eta, c))), s)).real()));
    os << "N=" << n << " (C=" << c << "): " << num(bare.back()) << " / " << num(dephased.back()) << "; ";
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < bare.size(); ++i) decreasing = decreasing && bare[i] < bare[i - 1];
  const bool floored = *std::min_element(dephased.begin(), dephased.end()) >= eta / 8.0 - 1e-10;
  os << "eta=0 " << (decreasing ? "strictly decreasing" : "not decreasing") << ", eta=0.2 "
     << (floored ? "above" : "below") << " eta/8";
  return {decreasing && floored, os.str()};
}

double log_decay_rate(const std::vector<double>& t, const std::vector<double>& y) {
  const std::size_t n = t.size();
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ly = std::log(y[i]);
    st += t[i];
    sy += ly;
    stt += t[i] * t[i];
    sty += t[i] * ly;
  }
  return -(n * sty - st * sy) / (n * stt - st * st);
}

/// Trajectories shared by the dynamics and integrity criteria.
struct Trajectories {
  Index cutoff = 0;
  double alpha = 0.0;
  EvolutionTrace bare;
  EvolutionTrace dephased;
  EvolutionTrace decay;
};

const Trajectories& trajectories() {
  static const Trajectories t = [] {
    Trajectories out;
    out.cutoff = laser_cutoff(1.25, 10.0);
    const Index c = out.cutoff;
    out.alpha = std::sqrt(photons(steady_state(laser_model(laser(1.25, 10.0, 0.0, c)))));
    const auto rho0 = coherent_state(cdouble(out.alpha), c);
    const auto times = record_times(50.0, 101);
    EvolveOptions opts;
    opts.keep_states = true;
    out.bare = evolve_sectorwise(laser_model(laser(1.25, 10.0, 0.0, c)), rho0, times, c - 1, default_observables(c), opts);
    opts.keep_states = false;
    out.dephased =
        evolve_sectorwise(laser_model(laser(1.25, 10.0, 0.2, c)), rho0, times, c - 1, default_observables(c), opts);
    const LindbladModelXcd decay(OperatorXcd::Zero(c, c), {annihilation(c)}, SymmetryKind::U1);
    out.decay = evolve_sectorwise(decay, rho0, record_times(20.0, 101), c - 1, default_observables(c), opts);
    return out;
  }();
  return t;
}

Outcome dynamics_cross_check() {
  const auto& tr = trajectories();
  const double eta = 0.2;
  const auto& n0 = tr.bare.observables.at("n");
  const auto& n1 = tr.dephased.observables.at("n");
  double dn = 0.0;
  for (std::size_t i = 0; i < n0.size(); ++i) dn = std::max(dn, std::abs(n0[i] - n1[i]));
  std::vector<double> a0, a1;
  for (const auto& v : tr.bare.observables.at("a")) a0.push_back(std::abs(v));
  for (const auto& v : tr.dephased.observables.at("a")) a1.push_back(std::abs(v));
  const double excess = log_decay_rate(tr.dephased.times, a1) - log_decay_rate(tr.bare.times, a0);
  const double rel = std::abs(excess / (eta / 8.0) - 1.0);
  const double a2 = tr.alpha * tr.alpha;
  const IntegratorOptions integ;
  double decay_dev = 0.0;
  for (std::size_t i = 0; i < tr.decay.times.size(); ++i)
    decay_dev = std::max(decay_dev, std::abs(tr.decay.observables.at("n")[i].real() - a2 * std::exp(-tr.decay.times[i])));
  const double decay_tol = 10.0 * (integ.rtol * a2 + integ.atol);
  const bool ok = dn < 1e-6 && rel <= 0.15 && decay_dev < decay_tol;
  return {ok, "C=" + std::to_string(tr.cutoff) + ", (i) max |dn| " + num(dn) + ", (ii) decay-rate excess " + num(excess) +
                  " vs eta/8 = " + num(eta / 8) + " (" + num(100 * rel) + "% off), (iii) pure-decay deviation " +
                  num(decay_dev) + " < " + num(decay_tol)};
}

Outcome sector_union() {
  auto compare = [](const LindbladModelXcd& model, const std::vector<SymmetrySector>& sectors) {
    const Generator<double> gen(model);
    std::vector<cdouble> joined;
    for (const auto& s : sectors) {
      const auto v = eigenvalues(sector_liouvillian(gen, s).entries);
      joined.insert(joined.end(), v.begin(), v.end());
    }
    return multiset_deviation(joined, full_spectrum(vectorize(model)));
  };
  const double dl = compare(laser_model(laser(1.25, 1.0, 0.2, 10)), u1_sectors(10, 9));
  const double dk = compare(kerr_model(kerr_small(0.2, 8)), z2_sectors(8));
  return {dl < 1e-8 && dk < 1e-8, "laser C=10 deviation " + num(dl) + ", Kerr C=8 deviation " + num(dk)};
}

WignerGridSpec preset_grid(double photon_number) {
  const double w = std::sqrt(photon_number) + 3.5;
  WignerGridSpec spec;
  spec.re_min = spec.im_min = -w;
  spec.re_max = spec.im_max = w;
  spec.re_points = spec.im_points = 61;
  return spec;
}

Outcome state_integrity() {
  const auto& tr = trajectories();
  double tr_dev = 0.0, herm_dev = 0.0, min_eig = std::numeric_limits<double>::infinity();
  for (const auto* t : {&tr.bare, &tr.dephased, &tr.decay}) {
    tr_dev = std::max(tr_dev, t->integrity.max_trace_deviation);
    herm_dev = std::max(herm_dev, t->integrity.max_hermiticity_deviation);
    min_eig = std::min(min_eig, t->integrity.min_eigenvalue);
  }
  WignerGridSpec origin;
  origin.re_min = origin.re_max = origin.im_min = origin.im_max = 0.0;
  origin.re_points = origin.im_points = 1;
  const double w0 = wigner(fock_state(0, 20), origin).values(0, 0);
  const double vac_dev = std::abs(w0 - 2.0 / std::numbers::pi);

  double norm_dev = 0.0;
  std::vector<DensityMatrixXcd> states;
  auto laser_preset = laser_fig1_preset();
  laser_preset.cutoff = suggest_laser_cutoff(laser_preset).cutoff;
  states.push_back(steady_state(laser_model(laser_preset)));
  auto kerr_preset = kerr_fig2_preset();
  kerr_preset.cutoff = suggest_kerr_cutoff(kerr_preset).cutoff;
  states.push_back(steady_state(kerr_model(kerr_preset)));
  for (double t : {10.0, 50.0}) {
    const auto it = std::find(tr.bare.times.begin(), tr.bare.times.end(), t);
    const OperatorXcd& m = tr.bare.states[static_cast<std::size_t>(it - tr.bare.times.begin())];
    states.emplace_back(OperatorXcd((m + m.adjoint()) / 2.0), 1e-7);
  }
  for (const auto& rho : states)
    norm_dev = std::max(norm_dev, std::abs(wigner(rho, preset_grid(photons(rho))).normalization() - 1.0));
  const bool ok = tr_dev < 1e-8 && herm_dev < 1e-8 && min_eig > -1e-7 && vac_dev < 1e-10 && norm_dev < 0.02;
  return {ok, "trace " + num(tr_dev) + ", hermiticity " + num(herm_dev) + ", min eigenvalue " + num(min_eig) +
                  ", vacuum W(0) deviation " + num(vac_dev) + ", worst Wigner normalization error " + num(norm_dev) +
                  " over " + std::to_string(states.size()) + " preset states"};
}

Outcome weak_symmetry() {
  const auto lp = laser_model(laser_fig1_preset());
  const auto kp = kerr_model(kerr_fig2_preset());
  const Index cl = lp.cutoff();
  const Index ck = kp.cutoff();
  const auto rl = verify_weak_symmetry(lp, phase_rotation(0.7, cl));
  const auto rk = verify_weak_symmetry(kp, parity(ck));
  const OperatorXcd a = annihilation(ck);
  const LindbladModelXcd driven(OperatorXcd(kp.hamiltonian() + (a + a.adjoint())), kp.jumps(), SymmetryKind::Z2);
  const auto rd = verify_weak_symmetry(driven, parity(ck));
  const bool ok = rl.passed && rl.max_leakage < 1e-10 && rk.passed && rk.max_leakage < 1e-10 && !rd.passed &&
                  rd.max_leakage > 1e-3;
  return {ok, "laser leakage " + num(rl.max_leakage) + ", Kerr leakage " + num(rk.max_leakage) +
                  ", Kerr + linear drive leakage " + num(rd.max_leakage)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> check;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "steady photon number independent of dephasing", dephasing_independence},
      {2, "elbow sharpening with N", elbow_sharpening},
      {3, "U(1) dephasing shift law", u1_shift_law},
      {4, "Z2 parity-jump shift law", z2_shift_law},
      {5, "critical slowing down and dephasing floor", critical_slowing},
      {6, "dynamics cross-check", dynamics_cross_check},
      {7, "sector union equals full spectrum", sector_union},
      {8, "state integrity and Wigner checks", state_integrity},
      {9, "weak-symmetry verification", weak_symmetry},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  set_warning_handler([](const std::string&) {});
  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << o.detail << " ["
              << num(secs) << " s]" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
