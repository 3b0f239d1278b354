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
#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "dptlab/errors.hpp"
#include "dptlab/types.hpp"

namespace dptlab {

struct IntegratorOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  /// Initial step; 0 picks one from the right-hand side.
  double initial_step = 0.0;
  double max_step = 0.0;
  std::size_t max_steps = 5'000'000;
};

struct IntegratorStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
};

/// Dormand-Prince 5(4) with PI step-size control and 4th-order dense output.
///
/// `State` is any Eigen dense type; `rhs(t, y, dydt)` fills dydt. `observe(i, y)`
/// is called for each time in `record_times` (ascending, within [t0, t_final]).
template <typename State, typename Rhs, typename Observe>
IntegratorStats integrate_dopri5(Rhs&& rhs, State y, double t0, double t_final,
                                 const std::vector<double>& record_times, Observe&& observe,
                                 const IntegratorOptions& options = {}) {
  // Butcher tableau and error weights.
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;
  constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                   d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                   d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
  constexpr double safety = 0.9, beta = 0.04, expo = 0.2 - 0.75 * beta;
  constexpr double min_factor = 0.2, max_factor = 10.0;

  if (!(t_final >= t0)) throw InvalidArgument("integration interval must be increasing");
  const std::size_t n_records = record_times.size();
  std::size_t next_record = 0;
  IntegratorStats stats;
  auto emit_until = [&](double t_limit, auto&& value_at) {
    while (next_record < n_records && record_times[next_record] <= t_limit) {
      observe(next_record, value_at(record_times[next_record]));
      ++next_record;
    }
  };

  auto error_norm = [&](const State& err, const State& y_old, const State& y_new) {
    const auto scale =
        (options.atol + options.rtol * y_old.cwiseAbs().cwiseMax(y_new.cwiseAbs()).array()).eval();
    const double sum = (err.cwiseAbs().array() / scale).square().sum();
    return std::sqrt(sum / static_cast<double>(std::max<Index>(1, err.size())));
  };

  State k1(y.rows(), y.cols()), k2(y.rows(), y.cols()), k3(y.rows(), y.cols()), k4(y.rows(), y.cols()),
      k5(y.rows(), y.cols()), k6(y.rows(), y.cols()), k7(y.rows(), y.cols());
  State stage(y.rows(), y.cols()), y_new(y.rows(), y.cols()), err(y.rows(), y.cols());

  double t = t0;
  rhs(t, y, k1);
  ++stats.evaluations;
  emit_until(t, [&](double) -> const State& { return y; });
  if (t_final == t0) return stats;

  const double span = t_final - t0;
  double h = options.initial_step;
  if (h <= 0.0) {
    const double dnf = y.norm() / std::sqrt(double(y.size()));
    const double dny = k1.norm() / std::sqrt(double(y.size()));
    const double sk = options.atol + options.rtol * dnf;
    h = (dnf / sk < 1e-10 || dny / sk < 1e-10) ? 1e-6 : 0.01 * (dnf / dny);
    h = std::min(h, span);
  }
  const double h_max = options.max_step > 0.0 ? options.max_step : span;
  double err_old = 1e-4;
  bool last_rejected = false;

  while (t < t_final) {
    if (stats.accepted + stats.rejected >= options.max_steps) {
      throw StiffnessError("integrator exceeded " + std::to_string(options.max_steps) +
                           " steps; the problem is likely stiff: use a larger cutoff or looser tolerance");
    }
    h = std::min(h, h_max);
    if (t + h > t_final) h = t_final - t;
    if (h < 1e-14 * std::max(1.0, std::abs(t))) {
      std::ostringstream os;
      os << "step size underflow (h = " << h << " at t = " << t
         << "); the problem is likely stiff: use a larger cutoff or a smaller tolerance";
      throw StiffnessError(os.str());
    }
    stage = y + h * (a21 * k1);
    rhs(t + c2 * h, stage, k2);
    stage = y + h * (a31 * k1 + a32 * k2);
    rhs(t + c3 * h, stage, k3);
    stage = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * h, stage, k4);
    stage = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * h, stage, k5);
    stage = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + h, stage, k6);
    y_new = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    rhs(t + h, y_new, k7);
    stats.evaluations += 6;
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double err_norm = error_norm(err, y, y_new);
    if (!std::isfinite(err_norm)) throw NumericalError("integrator produced non-finite values");

    if (err_norm <= 1.0) {
      const double t_new = (t_final - (t + h) < 1e-12 * span) ? t_final : t + h;
      if (next_record < n_records && record_times[next_record] <= t_new) {
        const State diff = y_new - y;
        const State bspl = h * k1 - diff;
        const State r4 = diff - h * k7 - bspl;
        const State r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        State value(y.rows(), y.cols());
        emit_until(t_new, [&](double tr) -> const State& {
          if (tr == t_new) return y_new;
          const double theta = (tr - t) / h;
          const double theta1 = 1.0 - theta;
          value = y + theta * (diff + theta1 * (bspl + theta * (r4 + theta1 * r5)));
          return value;
        });
      }
      double factor = std::pow(err_norm, expo) / std::pow(err_old, beta) / safety;
      factor = std::clamp(factor, 1.0 / max_factor, 1.0 / min_factor);
      err_old = std::max(err_norm, 1e-4);
      double h_next = h / factor;
      if (last_rejected) h_next = std::min(h_next, h);
      y.swap(y_new);
      k1.swap(k7);
      t = t_new;
      h = h_next;
      last_rejected = false;
      ++stats.accepted;
    } else {
      h /= std::min(1.0 / min_factor, std::pow(err_norm, expo) / safety);
      last_rejected = true;
      ++stats.rejected;
    }
  }
  emit_until(t_final, [&](double) -> const State& { return y; });
  return stats;
}

}  // namespace dptlab
