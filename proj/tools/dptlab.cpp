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

#include <iostream>

#include <CLI11.hpp>

#include "dptlab/cli/config.hpp"
#include "dptlab/cli/run.hpp"
#include "dptlab/errors.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalFailure = 3;
constexpr int kIoError = 4;

}  // namespace

int main(int argc, char** argv) {
  using namespace dptlab::cli;
  CLI::App app{"Dissipative phase transitions in Lindblad models with weak symmetries", "dptlab"};
  std::string task;
  std::optional<std::filesystem::path> config_file;
  Overrides ov;
  app.add_option("task", task, "steady | spectrum | evolve | wigner | sweep | sectors-check")->required();
  app.add_option("--config", config_file, "TOML configuration file");
  app.add_option("--preset", ov.preset, "shipped preset: laser-fig1 | kerr-fig2");
  app.add_option("--param", ov.params, "model parameter override NAME=VALUE (repeatable)");
  app.add_option("--n", ov.n, "system-size parameter N");
  app.add_option("--eta", ov.eta, "laser dephasing rate");
  app.add_option("--zeta", ov.zeta, "Kerr parity-jump rate");
  app.add_option("--cutoff", ov.cutoff, "Fock cutoff: auto or an integer");
  app.add_option("--kmax", ov.kmax, "largest reported U(1) sector");
  app.add_option("--out", ov.out, "output directory");
  app.add_option("--workers", ov.workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--no-timestamp", ov.no_timestamp, "omit the timestamp comment line");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }
  ov.task = task;

  try {
    const RunConfig config = load_config(config_file, ov);
    const RunReport report = run(config);
    for (const auto& f : report.files) std::cout << f.string() << "\n";
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIoError;
  } catch (const dptlab::Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  }
}
