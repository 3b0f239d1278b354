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

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dptlab/cli/config.hpp"

namespace dptlab::cli {

using CsvCell = std::variant<double, long long, std::string>;

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<CsvCell>> rows;
};

/// 17 significant digits.
std::string format_double(double value);

/// RFC 4180 text with CRLF line ends; an optional leading "# ..." comment line.
std::string csv_text(const CsvTable& table, const std::optional<std::string>& comment = std::nullopt);

/// Writes csv_text to `path`; throws IoError.
void emit_csv(const CsvTable& table, const std::filesystem::path& path,
              const std::optional<std::string>& comment = std::nullopt);

struct SectorShiftRow {
  int k = 0;
  double max_action = 0.0;
  cdouble shift;
  double expected = 0.0;
  double deviation = 0.0;
};

struct SectorsCheckReport {
  Index cutoff = 0;
  std::string symmetry_operator;
  std::string removal_operator;
  double removal_rate = 0.0;
  WeakSymmetryReport weak;
  bool removal_passed = false;
  bool shift_law_passed = false;
  std::vector<SectorShiftRow> sectors;
  bool passed = false;

  std::string text() const;
};

/// verify_weak_symmetry plus ssb_removal_check and the measured per-sector shifts, at cutoff `cutoff`.
SectorsCheckReport sectors_check(const RunConfig& config, Index cutoff);

struct RunReport {
  std::filesystem::path dir;
  std::vector<std::filesystem::path> files;
};

/// Runs the configured task and writes its outputs, summary.json and effective_config.toml.
RunReport run(const RunConfig& config);

}  // namespace dptlab::cli
