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

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dptlab/dynamics.hpp"
#include "dptlab/models.hpp"

namespace dptlab::cli {

/// Bad configuration input; maps to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unwritable output; maps to exit status 4.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Task { Steady, Spectrum, Evolve, Wigner, Sweep, SectorsCheck };
enum class ModelKind { Laser, Kerr };

const char* to_string(Task task);
const char* to_string(ModelKind kind);
Task parse_task(const std::string& name);
std::vector<std::string> task_names();

struct NumericsConfig {
  /// Empty means auto.
  std::optional<Index> cutoff;
  double cutoff_tolerance = 1e-10;
  Index kmax = 2;
  Index spectrum_count = 10;
  double gap_floor = 1e-10;
  double leakage_tolerance = 1e-10;
  double rtol = 1e-8;
  double atol = 1e-10;
  std::size_t workers = 1;
};

struct SweepConfig {
  /// "A" for the laser, "G" for Kerr.
  std::string parameter;
  std::vector<double> grid;
  std::vector<double> n_values;
  /// eta (laser) or zeta (Kerr) values.
  std::vector<double> rates;
};

struct EvolveConfig {
  double t_final = 20.0;
  Index records = 101;
  /// "coherent-ss", "coherent" or "vacuum".
  std::string initial = "coherent-ss";
  cdouble alpha{0.0, 0.0};
  /// "auto", "full" or "sectorwise".
  std::string method = "auto";
};

struct WignerConfig {
  /// "steady" or "evolved".
  std::string state = "steady";
  std::vector<double> times{0.0};
  /// Half-width of the square grid; empty means sqrt(<n>) + 3.5.
  std::optional<double> extent;
  Index points = 61;
};

struct SectorsCheckConfig {
  /// "default" uses the model's own removal operator, "decay" a sqrt(rate) a control.
  std::string removal = "default";
  /// Removal rate when the model's eta / zeta is zero.
  double rate = 0.2;
  double phi = 0.7;
};

struct OutputConfig {
  std::filesystem::path dir = "dptlab-out";
  bool timestamp = true;
};

struct RunConfig {
  Task task = Task::Steady;
  ModelKind model = ModelKind::Laser;
  LaserConfig laser;
  KerrConfig kerr;
  NumericsConfig numerics;
  SweepConfig sweep;
  EvolveConfig evolve;
  WignerConfig wigner;
  SectorsCheckConfig sectors_check;
  OutputConfig output;

  /// Scaling parameter, removal rate and the named model parameter of the active model.
  double n() const;
  double rate() const;
  void set_n(double value);
  void set_rate(double value);
  void set_model_parameter(const std::string& name, double value);
  double model_parameter(const std::string& name) const;

  /// Throws ConfigError on any invalid field.
  void validate() const;
};

/// Preset expansion: model parameters plus sweep and Wigner defaults.
RunConfig preset_config(const std::string& name);

/// Command-line overrides, applied after the file.
struct Overrides {
  std::optional<std::string> task;
  std::optional<std::string> preset;
  std::vector<std::string> params;
  std::optional<double> n;
  std::optional<double> eta;
  std::optional<double> zeta;
  std::optional<std::string> cutoff;
  std::optional<Index> kmax;
  std::optional<std::filesystem::path> out;
  std::optional<std::size_t> workers;
  bool no_timestamp = false;
};

/// Parses TOML text. `origin` names the source in diagnostics.
RunConfig parse_config(const std::string& text, const std::string& origin = "config",
                       const std::optional<std::string>& preset = std::nullopt);

/// Reads and parses a config file; the preset (file key or override) is expanded first.
RunConfig load_config(const std::optional<std::filesystem::path>& file, const Overrides& overrides);

void apply_overrides(RunConfig& config, const Overrides& overrides);

/// Fully resolved TOML that reproduces the run.
std::string effective_config_toml(const RunConfig& config);

}  // namespace dptlab::cli
