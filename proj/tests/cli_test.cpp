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

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "dptlab/cli/config.hpp"
#include "dptlab/cli/run.hpp"

namespace dptlab::cli {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("dptlab_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string error_of(const std::string& text) {
  try {
    parse_config(text, "t.toml").validate();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

constexpr const char* kSmallLaser = R"(
task = "steady"
[model]
name = "laser"
A = 1.5
B = 0.2
N = 2
[numerics]
cutoff = 30
)";

TEST(Config, ParsesExplicitModel) {
  const auto c = parse_config(kSmallLaser);
  EXPECT_EQ(c.task, Task::Steady);
  EXPECT_EQ(c.model, ModelKind::Laser);
  EXPECT_DOUBLE_EQ(c.laser.A, 1.5);
  EXPECT_DOUBLE_EQ(c.laser.B, 0.2);
  EXPECT_DOUBLE_EQ(c.n(), 2.0);
  ASSERT_TRUE(c.numerics.cutoff.has_value());
  EXPECT_EQ(*c.numerics.cutoff, 30);
}

TEST(Config, DiagnosticsNameFieldAndLine) {
  const std::string unknown = error_of("[model]\nname = \"laser\"\nAlpha = 1\n");
  EXPECT_NE(unknown.find("t.toml:3"), std::string::npos) << unknown;
  EXPECT_NE(unknown.find("Alpha"), std::string::npos) << unknown;
  EXPECT_NE(error_of("[model]\nname = \"laser\"\nA = \"big\"\n").find("A"), std::string::npos);
  EXPECT_FALSE(error_of("[model\n").empty());
  EXPECT_FALSE(error_of("[model]\nname = \"maser\"\n").empty());
  EXPECT_FALSE(error_of("[numerics]\ncutoff = 1\n").empty());
  EXPECT_FALSE(error_of("[numerics]\ncutoff = \"sometimes\"\n").empty());
  EXPECT_FALSE(error_of("[model]\nname = \"laser\"\nA = -1\n").empty());
  EXPECT_FALSE(error_of("task = \"dance\"\n").empty());
}

TEST(Config, PresetsExpand) {
  const auto laser = preset_config("laser-fig1");
  EXPECT_EQ(laser.model, ModelKind::Laser);
  EXPECT_DOUBLE_EQ(laser.laser.A, 1.25);
  EXPECT_DOUBLE_EQ(laser.n(), 10.0);
  EXPECT_EQ(laser.sweep.grid.size(), 40u);
  EXPECT_NEAR(laser.sweep.grid[1] - laser.sweep.grid[0], 0.05, 1e-15);
  const auto kerr = preset_config("kerr-fig2");
  EXPECT_EQ(kerr.model, ModelKind::Kerr);
  EXPECT_DOUBLE_EQ(kerr.kerr.Delta, 10.0);
  EXPECT_DOUBLE_EQ(kerr.kerr.U, 10.0);
  EXPECT_THROW(preset_config("nope"), ConfigError);
}

TEST(Config, OverridesApplyAfterFile) {
  const fs::path dir = scratch("overrides");
  fs::create_directories(dir);
  const fs::path file = dir / "c.toml";
  std::ofstream(file) << kSmallLaser;
  Overrides ov;
  ov.task = "spectrum";
  ov.params = {"A=1.25", "B=0.1"};
  ov.n = 5;
  ov.eta = 0.2;
  ov.cutoff = "auto";
  ov.kmax = 3;
  ov.out = dir / "out";
  ov.workers = 2;
  ov.no_timestamp = true;
  const auto c = load_config(file, ov);
  EXPECT_EQ(c.task, Task::Spectrum);
  EXPECT_DOUBLE_EQ(c.laser.A, 1.25);
  EXPECT_DOUBLE_EQ(c.laser.B, 0.1);
  EXPECT_DOUBLE_EQ(c.laser.N, 5.0);
  EXPECT_DOUBLE_EQ(c.laser.eta, 0.2);
  EXPECT_FALSE(c.numerics.cutoff.has_value());
  EXPECT_EQ(c.numerics.kmax, 3);
  EXPECT_EQ(c.numerics.workers, 2u);
  EXPECT_FALSE(c.output.timestamp);

  Overrides bad;
  bad.task = "steady";
  bad.zeta = 0.2;
  EXPECT_THROW(load_config(file, bad), ConfigError);
  bad = {};
  bad.task = "steady";
  bad.params = {"A"};
  EXPECT_THROW(load_config(file, bad), ConfigError);
  bad.params = {"Q=1"};
  EXPECT_THROW(load_config(file, bad), ConfigError);
  EXPECT_THROW(load_config(dir / "missing.toml", ov), IoError);
}

TEST(Config, EchoRoundTrips) {
  for (const char* preset : {"laser-fig1", "kerr-fig2"}) {
    Overrides ov;
    ov.task = "sweep";
    ov.preset = preset;
    const auto c = load_config(std::nullopt, ov);
    const std::string echo = effective_config_toml(c);
    const auto again = parse_config(echo, "echo");
    EXPECT_EQ(effective_config_toml(again), echo) << preset;
    EXPECT_EQ(again.sweep.grid, c.sweep.grid);
    EXPECT_EQ(again.laser.B, c.laser.B);
  }
}

TEST(Csv, FormatsRfc4180) {
  CsvTable t{{"name", "x", "k"}, {{std::string("a,b"), 0.1, 3LL}, {std::string("q\"t"), -1e-300, -2LL}}};
  EXPECT_EQ(csv_text(t), "name,x,k\r\n\"a,b\",0.10000000000000001,3\r\n\"q\"\"t\",-1e-300,-2\r\n");
  EXPECT_EQ(csv_text(t, std::string("# c")).substr(0, 5), "# c\r\n");
  EXPECT_EQ(format_double(1.0 / 3.0), "0.33333333333333331");
  CsvTable ragged{{"a", "b"}, {{1.0}}};
  EXPECT_THROW(csv_text(ragged), std::logic_error);
  EXPECT_THROW(emit_csv(t, fs::path("/nonexistent-dir/x.csv")), IoError);
}

RunConfig small_config(Task task, const fs::path& out) {
  auto c = parse_config(kSmallLaser);
  c.task = task;
  c.output.dir = out;
  c.output.timestamp = false;
  return c;
}

TEST(Run, SteadyWritesSummaryAndIsDeterministic) {
  const fs::path a = scratch("steady_a");
  const fs::path b = scratch("steady_b");
  run(small_config(Task::Steady, a));
  run(small_config(Task::Steady, b));
  EXPECT_EQ(slurp(a / "steady_populations.csv"), slurp(b / "steady_populations.csv"));
  const auto summary = nlohmann::json::parse(slurp(a / "summary.json"));
  for (const char* key : {"model", "params", "cutoff", "convergence_table", "observables", "gaps_by_sector", "wall_time_s"})
    EXPECT_TRUE(summary.contains(key)) << key;
  EXPECT_EQ(summary["model"], "laser");
  EXPECT_EQ(summary["cutoff"], 30);
  EXPECT_GT(summary["observables"]["photon_number"].get<double>(), 0.0);
  EXPECT_TRUE(summary["gaps_by_sector"].contains("1"));

  const auto echo = parse_config(slurp(a / "effective_config.toml"), "echo");
  const fs::path c = scratch("steady_c");
  auto rerun = echo;
  rerun.output.dir = c;
  run(rerun);
  EXPECT_EQ(slurp(a / "steady_populations.csv"), slurp(c / "steady_populations.csv"));
}

TEST(Run, TimestampLineIsOptional) {
  const fs::path a = scratch("stamp");
  auto c = small_config(Task::Spectrum, a);
  c.output.timestamp = true;
  run(c);
  const std::string text = slurp(a / "spectrum.csv");
  EXPECT_EQ(text.rfind("# generated ", 0), 0u);
  const auto second = text.substr(text.find("\r\n") + 2);
  EXPECT_EQ(second.rfind("sector,index,re_lambda,im_lambda\r\n", 0), 0u);
}

TEST(Run, SpectrumSortedBySectorThenRate) {
  const fs::path a = scratch("spectrum");
  run(small_config(Task::Spectrum, a));
  std::istringstream in(slurp(a / "spectrum.csv"));
  std::string line;
  std::getline(in, line);
  int last_sector = -1;
  double last_rate = -1.0;
  int rows = 0;
  while (std::getline(in, line)) {
    int sector = 0;
    long index = 0;
    double re = 0, im = 0;
    ASSERT_EQ(std::sscanf(line.c_str(), "%d,%ld,%lf,%lf", &sector, &index, &re, &im), 4);
    if (sector != last_sector) {
      EXPECT_GT(sector, last_sector);
      last_sector = sector;
      last_rate = -1.0;
    }
    EXPECT_GE(std::abs(re), last_rate - 1e-9);
    last_rate = std::abs(re);
    ++rows;
  }
  EXPECT_EQ(last_sector, 2);
  EXPECT_EQ(rows, 30);
}

TEST(Run, SweepHeaderAndOrder) {
  const fs::path a = scratch("sweep");
  auto c = small_config(Task::Sweep, a);
  c.sweep = {"A", {0.5, 1.0, 1.5}, {1.0, 2.0}, {0.0, 0.2}};
  c.numerics.cutoff.reset();
  c.numerics.workers = 2;
  run(c);
  std::istringstream in(slurp(a / "sweep.csv"));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "param,N,eta_or_zeta,n_photon_rescaled,gap_k0,gap_k1\r");
  std::vector<std::array<double, 6>> rows;
  while (std::getline(in, line)) {
    std::array<double, 6> r{};
    ASSERT_EQ(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf", &r[0], &r[1], &r[2], &r[3], &r[4], &r[5]), 6);
    rows.push_back(r);
  }
  ASSERT_EQ(rows.size(), 12u);
  EXPECT_EQ(rows[0][0], 0.5);
  EXPECT_EQ(rows[1][0], 1.0);
  EXPECT_EQ(rows[3][1], 2.0);
  EXPECT_EQ(rows[6][2], 0.2);
  for (int i = 0; i < 6; ++i) {
    EXPECT_NEAR(rows[i][3], rows[i + 6][3], 1e-10 * rows[i][3]);
    EXPECT_NEAR(rows[i][5] + 0.2 / 8, rows[i + 6][5], 1e-9);
  }
  const auto summary = nlohmann::json::parse(slurp(a / "summary.json"));
  EXPECT_EQ(summary["observables"]["criticality_witness"].size(), 4u);
}

TEST(Run, SectorsCheckReportsPassAndFail) {
  auto kerr = preset_config("kerr-fig2");
  kerr.kerr.G = 3.0;
  const auto pass = sectors_check(kerr, 12);
  EXPECT_TRUE(pass.passed);
  ASSERT_EQ(pass.sectors.size(), 2u);
  EXPECT_NEAR(pass.sectors[1].shift.real(), -0.4, 1e-12);
  EXPECT_NE(pass.text().find("overall PASS"), std::string::npos);
  kerr.sectors_check.removal = "decay";
  const auto fail = sectors_check(kerr, 12);
  EXPECT_FALSE(fail.removal_passed);
  EXPECT_NE(fail.text().find("overall FAIL"), std::string::npos);

  auto laser = parse_config(kSmallLaser);
  const auto lr = sectors_check(laser, 30);
  EXPECT_TRUE(lr.passed);
  ASSERT_EQ(lr.sectors.size(), 3u);
  EXPECT_NEAR(lr.sectors[2].shift.real(), -0.2 * 4 / 8, 1e-12);
}

TEST(Run, OutputDirectoryErrorsAreIo) {
  const fs::path a = scratch("blocked");
  fs::create_directories(a.parent_path());
  std::ofstream(a) << "file";
  EXPECT_THROW(run(small_config(Task::Steady, a / "sub")), IoError);
  fs::remove(a);
}

int shell(const std::string& args) {
  const int status = std::system((std::string(DPTLAB_EXECUTABLE) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Executable, ExitCodes) {
  const fs::path dir = scratch("exe");
  fs::create_directories(dir);
  std::ofstream(dir / "ok.toml") << kSmallLaser;
  std::ofstream(dir / "bad.toml") << "[model]\nname = \"laser\"\nA = -2\n";
  const std::string out = " --out " + (dir / "o").string();
  EXPECT_EQ(shell("steady --config " + (dir / "ok.toml").string() + out + " --no-timestamp"), 0);
  EXPECT_TRUE(fs::exists(dir / "o" / "summary.json"));
  EXPECT_EQ(shell("steady --config " + (dir / "bad.toml").string() + out), 2);
  EXPECT_EQ(shell("juggle --config " + (dir / "ok.toml").string() + out), 2);
  EXPECT_EQ(shell("steady --config " + (dir / "ok.toml").string() + " --bogus"), 2);
  EXPECT_EQ(shell("steady --config " + (dir / "ok.toml").string() + " --out /proc/forbidden"), 4);
  std::ofstream(dir / "wide.toml") << kSmallLaser << "[evolve]\ninitial = \"coherent\"\nalpha = [3.0, 0.0]\n";
  EXPECT_EQ(shell("evolve --config " + (dir / "wide.toml").string() + " --cutoff 10" + out), 3);
  EXPECT_EQ(shell("steady --config " + (dir / "missing.toml").string() + out), 4);
}

}  // namespace
}  // namespace dptlab::cli
