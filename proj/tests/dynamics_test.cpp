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

#include "dptlab/dynamics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dptlab/models.hpp"
#include "dptlab/spectral.hpp"

namespace dptlab {
namespace {

using cd = cdouble;
constexpr double kTwoOverPi = 2.0 / std::numbers::pi;

LindbladModelXcd decay_model(Index c) {
  return LindbladModelXcd(OperatorXcd::Zero(c, c), {annihilation(c)}, SymmetryKind::U1);
}

LaserConfig laser(double a, double n, double eta, Index c) {
  LaserConfig cfg;
  cfg.A = a;
  cfg.N = n;
  cfg.eta = eta;
  cfg.cutoff = c;
  return cfg;
}

TEST(Integrator, ExponentialDecayAndOrder) {
  using V = Eigen::VectorXd;
  V y0(1);
  y0 << 1.0;
  const std::vector<double> times{0.0, 0.5, 1.0, 2.0};
  auto run = [&](double rtol) {
    IntegratorOptions opts;
    opts.rtol = rtol;
    opts.atol = rtol * 1e-2;
    std::vector<double> out(times.size());
    integrate_dopri5<V>([](double, const V& y, V& dy) { dy = -y; }, y0, 0.0, 2.0, times,
                        [&](std::size_t i, const V& y) { out[i] = y(0); }, opts);
    double err = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) err = std::max(err, std::abs(out[i] - std::exp(-times[i])));
    return err;
  };
  const double loose = run(1e-5);
  const double tight = run(1e-9);
  EXPECT_LT(loose, 1e-4);
  EXPECT_LT(tight, 1e-8);
  EXPECT_LT(tight, loose);
}

TEST(Integrator, StepUnderflowIsStiffness) {
  using V = Eigen::VectorXd;
  V y0(1);
  y0 << 1.0;
  IntegratorOptions opts;
  opts.max_steps = 50;
  EXPECT_THROW(integrate_dopri5<V>([](double, const V& y, V& dy) { dy = -1e6 * y; }, y0, 0.0, 10.0, {0.0, 10.0},
                                   [](std::size_t, const V&) {}, opts),
               StiffnessError);
}

TEST(RecordTimes, Uniform) {
  const auto t = record_times(2.0, 5);
  ASSERT_EQ(t.size(), 5u);
  EXPECT_EQ(t.front(), 0.0);
  EXPECT_EQ(t.back(), 2.0);
  EXPECT_NEAR(t[1], 0.5, 1e-15);
  EXPECT_THROW(record_times(1.0, 1), InvalidArgument);
}

TEST(Evolve, PureDecayAnalytic) {
  const Index c = 40;
  const cd alpha(1.5, 0.5);
  const auto trace = evolve(decay_model(c), coherent_state(alpha, c), 3.0, default_observables(c), 31);
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    const double t = trace.times[i];
    EXPECT_NEAR(trace.observables.at("n")[i].real(), std::norm(alpha) * std::exp(-t), 1e-7);
    EXPECT_LT(std::abs(trace.observables.at("a")[i] - alpha * std::exp(-t / 2)), 1e-7);
  }
  EXPECT_LT(trace.integrity.max_trace_deviation, 1e-8);
  EXPECT_LT(trace.integrity.max_hermiticity_deviation, 1e-8);
  EXPECT_GT(trace.integrity.min_eigenvalue, -1e-7);
  ASSERT_TRUE(trace.final_state.has_value());
}

TEST(Evolve, RejectsBadInputs) {
  const auto rho = fock_state(0, 6);
  EXPECT_THROW(evolve(decay_model(6), rho, 0.0, default_observables(6), 3), InvalidArgument);
  EXPECT_THROW(evolve(decay_model(7), rho, 1.0, default_observables(7), 3), DimensionMismatch);
}

TEST(Evolve, TruncationGuard) {
  const Index c = 20;
  LaserConfig cfg = laser(2.0, 10.0, 0.0, c);
  EXPECT_THROW(evolve(laser_model(cfg), fock_state(0, c), 20.0, default_observables(c), 5), CutoffTooSmall);
}

TEST(Evolve, LaserCoherenceWithAndWithoutDephasing) {
  auto base = laser(1.25, 5.0, 0.0, 10);
  base.cutoff = suggest_laser_cutoff(base).cutoff;
  const Index c = base.cutoff;
  const auto rho_ss = steady_state(laser_model(base));
  const double n_ss = expectation(rho_ss, number(c)).real();
  const auto rho0 = coherent_state(cd(std::sqrt(n_ss)), c);
  const double eta = 0.2;
  auto dephased = base;
  dephased.eta = eta;
  const auto clean = evolve_sectorwise(laser_model(base), rho0, 20.0, c - 1, default_observables(c), 11);
  const auto deph = evolve_sectorwise(laser_model(dephased), rho0, 20.0, c - 1, default_observables(c), 11);
  for (std::size_t i = 0; i < clean.times.size(); ++i) {
    EXPECT_LT(std::abs(clean.observables.at("n")[i] - deph.observables.at("n")[i]), 1e-6);
    // Sector-1 blocks differ by -eta/8, so <a> picks up exactly that damping.
    const cd expected = clean.observables.at("a")[i] * std::exp(-eta * clean.times[i] / 8);
    EXPECT_LT(std::abs(deph.observables.at("a")[i] - expected), 1e-6);
  }
  EXPECT_GT(std::abs(clean.observables.at("a").back()), 0.5 * std::abs(clean.observables.at("a").front()));
  EXPECT_LT(std::abs(deph.observables.at("a").back()), std::abs(clean.observables.at("a").back()));
  ASSERT_TRUE(deph.final_state.has_value());
  EXPECT_GT(deph.integrity.min_eigenvalue, -1e-7);
}

TEST(Evolve, FullAndSectorwiseAgreeOnLaser) {
  const Index c = 40;
  const auto model = laser_model(laser(1.25, 2.0, 0.2, c));
  const auto rho0 = coherent_state(cd(2.0), c);
  const auto full = evolve(model, rho0, 5.0, default_observables(c), 6);
  const auto bands = evolve_sectorwise(model, rho0, 5.0, c - 1, default_observables(c), 6);
  ASSERT_TRUE(full.final_state.has_value());
  ASSERT_TRUE(bands.final_state.has_value());
  EXPECT_LT(max_abs(OperatorXcd(full.final_state->matrix() - bands.final_state->matrix())), 1e-8);
}

TEST(EvolveSectorwise, MatchesFullEvolution) {
  const Index c = 30;
  const auto model = laser_model(laser(1.25, 2.0, 0.1, c));
  const auto rho0 = coherent_state(cd(1.5, 0.7), c);
  const auto obs = default_observables(c);
  const auto full = evolve(model, rho0, 5.0, obs, 11);
  const auto bands = evolve_sectorwise(model, rho0, 5.0, 2, obs, 11);
  for (const auto& name : {"n", "a", "a2"}) {
    for (std::size_t i = 0; i < full.times.size(); ++i)
      EXPECT_LT(std::abs(full.observables.at(name)[i] - bands.observables.at(name)[i]), 1e-8) << name;
  }
  EXPECT_FALSE(bands.final_state.has_value());
}

TEST(EvolveSectorwise, DiagonalStateAndRefusal) {
  const Index c = 40;
  const auto model = laser_model(laser(1.5, 2.0, 0.0, c));
  OperatorXcd diag = OperatorXcd::Zero(c, c);
  for (Index n = 0; n < 5; ++n) diag(n, n) = 0.2;
  const DensityMatrixXcd rho0(diag);
  const auto obs = default_observables(c);
  EvolveOptions tight;
  tight.integrator.rtol = 1e-12;
  tight.integrator.atol = 1e-14;
  const auto full = evolve(model, rho0, 3.0, obs, 7, tight);
  const auto bands = evolve_sectorwise(model, rho0, 3.0, 0, obs, 7, tight);
  for (std::size_t i = 0; i < full.times.size(); ++i)
    EXPECT_LT(std::abs(full.observables.at("n")[i] - bands.observables.at("n")[i]), 1e-10);
  KerrConfig kerr;
  kerr.cutoff = 8;
  EXPECT_THROW(evolve_sectorwise(kerr_model(kerr), fock_state(0, 8), 1.0, 1, default_observables(8), 3),
               InvalidArgument);
}

TEST(Wigner, VacuumAndFockOne) {
  WignerGridSpec spec;
  spec.re_min = -1;
  spec.re_max = 1;
  spec.re_points = 3;
  spec.im_min = -1;
  spec.im_max = 1;
  spec.im_points = 3;
  const auto vac = wigner(fock_state(0, 20), spec);
  EXPECT_NEAR(vac.values(1, 1), kTwoOverPi, 1e-10);
  const auto one = wigner(fock_state(1, 20), spec);
  EXPECT_NEAR(one.values(1, 1), -kTwoOverPi, 1e-10);
}

TEST(Wigner, CoherentGaussianAndNormalization) {
  const Index c = 60;
  const cd beta(1.2, -0.9);
  WignerGridSpec spec;
  spec.re_min = -2.5;
  spec.re_max = 3.5;
  spec.re_points = 31;
  spec.im_min = -3.5;
  spec.im_max = 2.5;
  spec.im_points = 31;
  const auto grid = wigner(coherent_state(beta, c), spec, 2);
  double worst = 0.0;
  for (Index i = 0; i < grid.re_alpha.size(); ++i)
    for (Index j = 0; j < grid.im_alpha.size(); ++j) {
      const cd alpha(grid.re_alpha(i), grid.im_alpha(j));
      worst = std::max(worst, std::abs(grid.values(i, j) - kTwoOverPi * std::exp(-2 * std::norm(alpha - beta))));
    }
  EXPECT_LT(worst, 1e-6);
  EXPECT_LT(grid.max_imag_residue, 1e-10);
  EXPECT_NEAR(grid.normalization(), 1.0, 0.02);
}

TEST(Wigner, EvaluatorReusesGrid) {
  const Index c = 24;
  WignerGridSpec spec;
  spec.re_points = 9;
  spec.im_points = 9;
  spec.re_min = spec.im_min = -2;
  spec.re_max = spec.im_max = 2;
  const WignerEvaluator eval(spec, c);
  EXPECT_TRUE(eval.caches_displacements());
  const auto a = eval(fock_state(2, c));
  const auto b = wigner(fock_state(2, c), spec);
  EXPECT_LT((a.values - b.values).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_THROW(eval(fock_state(0, c + 1)), DimensionMismatch);
}

TEST(Wigner, ExactFarFromOrigin) {
  WignerGridSpec spec;
  spec.re_min = spec.im_min = -3;
  spec.re_max = spec.im_max = 3;
  spec.re_points = spec.im_points = 7;
  const auto grid = wigner(fock_state(1, 4), spec);
  double worst = 0.0;
  for (Index i = 0; i < 7; ++i)
    for (Index j = 0; j < 7; ++j) {
      const double r2 = std::norm(cd(grid.re_alpha(i), grid.im_alpha(j)));
      worst = std::max(worst, std::abs(grid.values(i, j) - kTwoOverPi * (4 * r2 - 1) * std::exp(-2 * r2)));
    }
  EXPECT_LT(worst, 1e-14);
}

TEST(SelectionRule, Examples) {
  const Index c = 40;
  const auto rho = coherent_state(cd(2.0), c).matrix();
  std::vector<std::pair<int, OperatorXcd>> parts;
  for (const auto& s : u1_sectors(c, c - 1)) parts.emplace_back(s.k, sector_project(rho, s));
  for (int n : {1, 2}) {
    const auto values = sector_selection_rule_check(parts, n);
    cd total = 0.0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (parts[i].first != n) EXPECT_LT(std::abs(values[i]), 1e-14);
      total += values[i];
    }
    OperatorXcd an = OperatorXcd::Identity(c, c);
    for (int p = 0; p < n; ++p) an = an * annihilation(c);
    EXPECT_LT(std::abs(total - trace_product(rho, an)), 1e-12);
    EXPECT_GT(std::abs(total), 1.0);
  }
}

}  // namespace
}  // namespace dptlab
