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

#include <cmath>
#include <numbers>
#include <sstream>

#include "dptlab/memory.hpp"
#include "dptlab/parallel.hpp"

namespace dptlab {

std::vector<NamedObservable> default_observables(Index cutoff) {
  const OperatorXcd a = annihilation(cutoff);
  return {{"n", number(cutoff)}, {"a", a}, {"a2", a * a}};
}

std::vector<double> record_times(double t_final, Index n_records) {
  if (!(t_final > 0.0)) throw InvalidArgument("t_final must be positive");
  if (n_records < 2) throw InvalidArgument("at least two record times are required");
  std::vector<double> times(static_cast<std::size_t>(n_records));
  for (Index i = 0; i < n_records; ++i) times[i] = t_final * static_cast<double>(i) / static_cast<double>(n_records - 1);
  times.back() = t_final;
  return times;
}

namespace {

void check_observables(const std::vector<NamedObservable>& observables, Index cutoff) {
  for (const auto& o : observables) require_operator(o.op, cutoff, ("observable " + o.name).c_str());
}

void check_times(const std::vector<double>& times) {
  if (times.size() < 2) throw InvalidArgument("at least two record times are required");
  if (times.front() != 0.0) throw InvalidArgument("record times must start at 0");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw InvalidArgument("record times must be strictly increasing");
}

double top_population(const OperatorXcd& rho) {
  const Index c = rho.rows();
  const Index band = std::max<Index>(1, static_cast<Index>(std::ceil(0.1 * static_cast<double>(c))));
  double pop = 0.0;
  for (Index n = c - band; n < c; ++n) pop += rho(n, n).real();
  return pop;
}

/// Records observables and integrity numbers for one state.
class Recorder {
 public:
  Recorder(EvolutionTrace& trace, const std::vector<NamedObservable>& observables, const EvolveOptions& options,
           bool positivity)
      : trace_(trace), observables_(observables), options_(options), positivity_(positivity) {
    for (const auto& o : observables_) trace_.observables[o.name].assign(trace_.times.size(), cdouble(0));
  }

  void record(std::size_t i, const OperatorXcd& rho) {
    for (const auto& o : observables_) trace_.observables[o.name][i] = trace_product(rho, o.op);
    auto& integ = trace_.integrity;
    integ.max_trace_deviation = std::max(integ.max_trace_deviation, std::abs(rho.trace() - cdouble(1)));
    integ.max_hermiticity_deviation =
        std::max(integ.max_hermiticity_deviation, max_abs(OperatorXcd(rho - rho.adjoint())));
    if (positivity_) {
      Eigen::SelfAdjointEigenSolver<OperatorXcd> es(OperatorXcd((rho + rho.adjoint()) / 2.0), Eigen::EigenvaluesOnly);
      integ.min_eigenvalue = std::min(integ.min_eigenvalue, es.eigenvalues().minCoeff());
    }
    if (options_.truncation_threshold >= 0.0) {
      const double pop = top_population(rho);
      if (pop > options_.truncation_threshold) {
        std::ostringstream os;
        os << "population " << pop << " in the top 10% of Fock levels at t = " << trace_.times[i]
           << " exceeds " << options_.truncation_threshold << "; increase the cutoff (C = " << rho.rows() << ")";
        throw CutoffTooSmall(os.str());
      }
    }
    if (options_.keep_states) trace_.states.push_back(rho);
  }

 private:
  EvolutionTrace& trace_;
  const std::vector<NamedObservable>& observables_;
  const EvolveOptions& options_;
  bool positivity_;
};

}  // namespace

EvolutionTrace evolve(const LindbladModelXcd& model, const DensityMatrixXcd& rho0, double t_final,
                      const std::vector<NamedObservable>& observables, Index n_records, const EvolveOptions& options) {
  return evolve(model, rho0, record_times(t_final, n_records), observables, options);
}

EvolutionTrace evolve(const LindbladModelXcd& model, const DensityMatrixXcd& rho0, const std::vector<double>& times,
                      const std::vector<NamedObservable>& observables, const EvolveOptions& options) {
  const Index c = model.cutoff();
  if (rho0.cutoff() != c) throw DimensionMismatch("initial state cutoff does not match the model");
  check_observables(observables, c);
  check_times(times);
  const double t_final = times.back();
  EvolutionTrace trace;
  trace.times = times;
  Recorder recorder(trace, observables, options, options.check_positivity);
  const Generator<double> gen(model);
  OperatorXcd last = rho0.matrix();
  trace.stats = integrate_dopri5<OperatorXcd>(
      [&](double, const OperatorXcd& y, OperatorXcd& dydt) { gen.apply_into(y, dydt); }, rho0.matrix(), 0.0, t_final,
      trace.times,
      [&](std::size_t i, const OperatorXcd& rho) {
        recorder.record(i, rho);
        if (i + 1 == trace.times.size()) last = rho;
      },
      options.integrator);
  trace.final_matrix = last;
  const double tol = std::max(1e-7, 10.0 * options.integrator.rtol);
  trace.final_state.emplace(OperatorXcd((last + last.adjoint()) / 2.0), tol);
  return trace;
}

EvolutionTrace evolve_sectorwise(const LindbladModelXcd& model, const DensityMatrixXcd& rho0, double t_final,
                                 Index kmax, const std::vector<NamedObservable>& observables, Index n_records,
                                 const EvolveOptions& options) {
  return evolve_sectorwise(model, rho0, record_times(t_final, n_records), kmax, observables, options);
}

EvolutionTrace evolve_sectorwise(const LindbladModelXcd& model, const DensityMatrixXcd& rho0,
                                 const std::vector<double>& times, Index kmax,
                                 const std::vector<NamedObservable>& observables, const EvolveOptions& options) {
  const Index c = model.cutoff();
  if (model.symmetry() != SymmetryKind::U1) throw InvalidArgument("sector-wise evolution requires a U1 model");
  if (rho0.cutoff() != c) throw DimensionMismatch("initial state cutoff does not match the model");
  check_observables(observables, c);
  check_times(times);
  const double t_final = times.back();
  const Generator<double> gen(model);
  const auto sectors = u1_sectors(c, kmax);

  EvolutionTrace trace;
  trace.times = times;
  std::vector<OperatorXcd> snapshots(trace.times.size(), OperatorXcd::Zero(c, c));
  for (const auto& sector : sectors) {
    const Eigen::SparseMatrix<cdouble> block = sector_liouvillian(gen, sector).entries.sparseView();
    const VectorXcd y0 = to_sector_vector(rho0.matrix(), sector);
    const auto stats = integrate_dopri5<VectorXcd>(
        [&](double, const VectorXcd& y, VectorXcd& dydt) { dydt.noalias() = block * y; }, y0, 0.0, t_final,
        trace.times,
        [&](std::size_t i, const VectorXcd& y) {
          for (Index p = 0; p < sector.size(); ++p) snapshots[i](sector.basis[p].first, sector.basis[p].second) = y(p);
        },
        options.integrator);
    trace.stats.accepted += stats.accepted;
    trace.stats.rejected += stats.rejected;
    trace.stats.evaluations += stats.evaluations;
  }
  const bool complete = kmax == c - 1;
  Recorder recorder(trace, observables, options, options.check_positivity && complete);
  for (std::size_t i = 0; i < snapshots.size(); ++i) recorder.record(i, snapshots[i]);
  trace.final_matrix = snapshots.back();
  if (complete) {
    const double tol = std::max(1e-7, 10.0 * options.integrator.rtol);
    trace.final_state.emplace(OperatorXcd((trace.final_matrix + trace.final_matrix.adjoint()) / 2.0), tol);
  }
  return trace;
}

double WignerGrid::cell_area() const {
  const double dre = re_alpha.size() > 1 ? (re_alpha(re_alpha.size() - 1) - re_alpha(0)) / double(re_alpha.size() - 1) : 0.0;
  const double dim = im_alpha.size() > 1 ? (im_alpha(im_alpha.size() - 1) - im_alpha(0)) / double(im_alpha.size() - 1) : 0.0;
  return dre * dim;
}

double WignerGrid::normalization() const { return values.sum() * cell_area(); }

namespace {

Eigen::VectorXd axis(double lo, double hi, Index points) {
  if (points < 1) throw InvalidArgument("Wigner grid needs at least one point per axis");
  if (points == 1) return Eigen::VectorXd::Constant(1, lo);
  if (!(hi > lo)) throw InvalidArgument("Wigner grid bounds must be increasing");
  return Eigen::VectorXd::LinSpaced(points, lo, hi);
}

}  // namespace

WignerEvaluator::WignerEvaluator(const WignerGridSpec& spec, Index cutoff, std::size_t workers)
    : spec_(spec),
      cutoff_(cutoff),
      workers_(workers),
      re_(axis(spec.re_min, spec.re_max, spec.re_points)),
      im_(axis(spec.im_min, spec.im_max, spec.im_points)) {
  require_cutoff<double>(cutoff);
  const Index points = re_.size() * im_.size();
  const long double bytes = static_cast<long double>(points) * cutoff * cutoff * sizeof(cdouble);
  if (bytes <= static_cast<long double>(memory_budget_bytes()) / 8) {
    displacements_ = parallel_map(static_cast<std::size_t>(points), workers_, [&](std::size_t p) {
      return displaced_parity(static_cast<Index>(p) / im_.size(), static_cast<Index>(p) % im_.size());
    });
  }
}

// D(alpha) P D(alpha)^dagger = D(2 alpha) P
OperatorXcd WignerEvaluator::displaced_parity(Index i, Index j) const {
  OperatorXcd k = displacement_elements(2.0 * cdouble(re_(i), im_(j)), cutoff_);
  for (Index n = 1; n < cutoff_; n += 2) k.col(n) = -k.col(n);
  return k;
}

WignerGrid WignerEvaluator::operator()(const DensityMatrixXcd& rho) const {
  if (rho.cutoff() != cutoff_) throw DimensionMismatch("state cutoff does not match the Wigner evaluator");
  const Index nre = re_.size();
  const Index nim = im_.size();
  const auto values = parallel_map(static_cast<std::size_t>(nre * nim), workers_, [&](std::size_t p) {
    const Index i = static_cast<Index>(p) / nim;
    const Index j = static_cast<Index>(p) % nim;
    const OperatorXcd k = displacements_.empty() ? displaced_parity(i, j) : displacements_[p];
    return cdouble(rho.matrix().transpose().cwiseProduct(k).sum() * (2.0 / std::numbers::pi));
  });
  WignerGrid grid{re_, im_, Eigen::MatrixXd(nre, nim), 0.0};
  for (Index i = 0; i < nre; ++i) {
    for (Index j = 0; j < nim; ++j) {
      const cdouble w = values[static_cast<std::size_t>(i * nim + j)];
      grid.values(i, j) = w.real();
      grid.max_imag_residue = std::max(grid.max_imag_residue, std::abs(w.imag()));
    }
  }
  return grid;
}

WignerGrid wigner(const DensityMatrixXcd& rho, const WignerGridSpec& spec, std::size_t workers) {
  return WignerEvaluator(spec, rho.cutoff(), workers)(rho);
}

std::vector<cdouble> sector_selection_rule_check(const std::vector<std::pair<int, OperatorXcd>>& projections, int n) {
  if (n < 0) throw InvalidArgument("power must be nonnegative");
  std::vector<cdouble> out;
  out.reserve(projections.size());
  for (const auto& [k, rho] : projections) {
    (void)k;
    const Index c = rho.rows();
    OperatorXcd an = OperatorXcd::Identity(c, c);
    const OperatorXcd a = annihilation(c);
    for (int p = 0; p < n; ++p) an = an * a;
    out.push_back(trace_product(rho, an));
  }
  return out;
}

}  // namespace dptlab
