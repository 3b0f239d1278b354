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

#include "dptlab/cli/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "dptlab/parallel.hpp"
#include "dptlab/spectral.hpp"

namespace dptlab::cli {

using json = nlohmann::json;

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string cell_text(const CsvCell& cell) {
  if (const auto* d = std::get_if<double>(&cell)) return format_double(*d);
  if (const auto* i = std::get_if<long long>(&cell)) return std::to_string(*i);
  return quote(std::get<std::string>(cell));
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

std::string timestamp_comment() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[64];
  std::strftime(buf, sizeof buf, "# generated %Y-%m-%dT%H:%M:%SZ by dptlab", &utc);
  return buf;
}

}  // namespace

std::string csv_text(const CsvTable& table, const std::optional<std::string>& comment) {
  std::string out;
  if (comment) out += *comment + "\r\n";
  for (std::size_t i = 0; i < table.header.size(); ++i) out += (i ? "," : "") + quote(table.header[i]);
  out += "\r\n";
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) throw std::logic_error("CSV row width does not match the header");
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + cell_text(row[i]);
    out += "\r\n";
  }
  return out;
}

void emit_csv(const CsvTable& table, const std::filesystem::path& path, const std::optional<std::string>& comment) {
  write_file(path, csv_text(table, comment));
}

namespace {

LaserConfig laser_at(const RunConfig& c, Index cutoff) {
  LaserConfig cfg = c.laser;
  cfg.cutoff = cutoff;
  return cfg;
}

KerrConfig kerr_at(const RunConfig& c, Index cutoff) {
  KerrConfig cfg = c.kerr;
  cfg.cutoff = cutoff;
  return cfg;
}

LindbladModelXcd build_model(const RunConfig& c, Index cutoff) {
  return c.model == ModelKind::Laser ? laser_model(laser_at(c, cutoff)) : kerr_model(kerr_at(c, cutoff));
}

struct ResolvedCutoff {
  Index cutoff = 0;
  std::vector<CutoffRow> table;
};

ResolvedCutoff resolve_cutoff(const RunConfig& c) {
  if (c.numerics.cutoff) return {*c.numerics.cutoff, {}};
  const auto s = c.model == ModelKind::Laser ? suggest_laser_cutoff(laser_at(c, 10), c.numerics.cutoff_tolerance)
                                             : suggest_kerr_cutoff(kerr_at(c, 10), c.numerics.cutoff_tolerance);
  return {s.cutoff, s.table};
}

json table_json(const std::vector<CutoffRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) out.push_back({{"cutoff", r.cutoff}, {"photon_number", r.value}});
  return out;
}

json params_json(const RunConfig& c) {
  json p;
  if (c.model == ModelKind::Laser) {
    p = {{"A", c.laser.A}, {"B", c.laser.B}, {"omega", c.laser.omega}, {"eta", c.laser.eta}, {"N", c.laser.N}};
  } else {
    p = {{"Delta", c.kerr.Delta}, {"G", c.kerr.G}, {"U", c.kerr.U}, {"zeta", c.kerr.zeta}, {"N", c.kerr.N}};
  }
  return p;
}

json complex_json(cdouble z) { return json::array({z.real(), z.imag()}); }

SteadyStateOptions steady_options(const RunConfig& c) {
  SteadyStateOptions o;
  o.gap_floor = c.numerics.gap_floor;
  return o;
}

SectorOptions sector_options(const RunConfig& c) {
  SectorOptions o;
  o.leakage_tolerance = c.numerics.leakage_tolerance;
  return o;
}

std::vector<SymmetrySector> reported_sectors(const RunConfig& c, Index cutoff) {
  if (c.model == ModelKind::Kerr) return z2_sectors(cutoff);
  std::vector<SymmetrySector> out;
  const Index kmax = std::min<Index>(c.numerics.kmax, cutoff - 1);
  for (Index k = 0; k <= kmax; ++k) out.push_back(u1_sector(cutoff, static_cast<int>(k)));
  return out;
}

/// |Re| of the slowest relevant rate per sector.
json gaps_json(const RunConfig& c, const Generator<double>& gen, const std::vector<SymmetrySector>& sectors) {
  json gaps = json::object();
  const auto values = parallel_map(sectors.size(), c.numerics.workers, [&](std::size_t i) {
    return slowest_rate(sector_liouvillian(gen, sectors[i], sector_options(c)));
  });
  for (std::size_t i = 0; i < sectors.size(); ++i) gaps[std::to_string(sectors[i].k)] = std::abs(values[i].real());
  return gaps;
}

std::vector<NamedObservable> standard_observables(Index cutoff) { return default_observables(cutoff); }

double photon_number(const DensityMatrixXcd& rho) { return expectation(rho, number(rho.cutoff())).real(); }

struct Context {
  const RunConfig& config;
  std::optional<std::string> comment;
  RunReport report;
  json summary;

  std::filesystem::path path(const std::string& name) const { return report.dir / name; }

  void csv(const CsvTable& table, const std::string& name) {
    emit_csv(table, path(name), comment);
    report.files.push_back(path(name));
  }
};

void run_steady(Context& ctx) {
  const RunConfig& c = ctx.config;
  const auto cut = resolve_cutoff(c);
  const auto model = build_model(c, cut.cutoff);
  const Generator<double> gen(model);
  const auto rho = steady_state(sector_liouvillian(gen, symmetric_sector(model.symmetry(), cut.cutoff),
                                                   sector_options(c)),
                                steady_options(c));
  const double n = photon_number(rho);
  json obs{{"photon_number", n},
           {"photon_number_rescaled", n / c.n()},
           {"a", complex_json(expectation(rho, annihilation(cut.cutoff)))},
           {"a2", complex_json(expectation(rho, OperatorXcd(annihilation(cut.cutoff) * annihilation(cut.cutoff))))},
           {"purity", rho.purity()},
           {"min_eigenvalue", rho.min_eigenvalue()},
           {"residual", max_abs(gen.apply(rho.matrix()))}};
  if (c.model == ModelKind::Laser) obs["validity_ratio"] = check_laser_validity(laser_at(c, cut.cutoff), n);
  ctx.summary["cutoff"] = cut.cutoff;
  ctx.summary["convergence_table"] = table_json(cut.table);
  ctx.summary["observables"] = obs;
  ctx.summary["gaps_by_sector"] = gaps_json(c, gen, reported_sectors(c, cut.cutoff));

  CsvTable populations{{"n", "p_n"}, {}};
  for (Index i = 0; i < cut.cutoff; ++i) populations.rows.push_back({static_cast<long long>(i), rho.matrix()(i, i).real()});
  ctx.csv(populations, "steady_populations.csv");
}

void run_spectrum(Context& ctx) {
  const RunConfig& c = ctx.config;
  const auto cut = resolve_cutoff(c);
  const auto model = build_model(c, cut.cutoff);
  const Generator<double> gen(model);
  const auto sectors = reported_sectors(c, cut.cutoff);
  const auto spectra = parallel_map(sectors.size(), c.numerics.workers, [&](std::size_t i) {
    const auto block = sector_liouvillian(gen, sectors[i], sector_options(c));
    return sector_spectrum(block, std::min(c.numerics.spectrum_count, block.dim()), false);
  });
  CsvTable table{{"sector", "index", "re_lambda", "im_lambda"}, {}};
  json gaps = json::object();
  json counts = json::object();
  for (const auto& s : spectra) {
    const auto values = s.values();
    for (std::size_t j = 0; j < values.size(); ++j)
      table.rows.push_back({static_cast<long long>(s.sector.k), static_cast<long long>(j), values[j].real(),
                            values[j].imag()});
    const std::size_t slow = s.sector.k == 0 ? 1 : 0;
    if (values.size() > slow) gaps[std::to_string(s.sector.k)] = std::abs(values[slow].real());
    counts[std::to_string(s.sector.k)] = s.sector.size();
  }
  ctx.csv(table, "spectrum.csv");
  ctx.summary["cutoff"] = cut.cutoff;
  ctx.summary["convergence_table"] = table_json(cut.table);
  ctx.summary["observables"] = {{"sector_dimensions", counts}};
  ctx.summary["gaps_by_sector"] = gaps;
}

struct Trajectory {
  Index cutoff = 0;
  std::vector<CutoffRow> table;
  cdouble alpha;
  double steady_photons = 0.0;
  std::string method;
  EvolutionTrace trace;
};

Trajectory run_trajectory(const RunConfig& c, const std::vector<double>& times, bool keep_states) {
  Trajectory out;
  const auto cut = resolve_cutoff(c);
  out.cutoff = cut.cutoff;
  out.table = cut.table;
  const auto model = build_model(c, cut.cutoff);
  out.steady_photons = photon_number(steady_state(model, steady_options(c)));
  DensityMatrixXcd rho0 = fock_state(0, cut.cutoff);
  if (c.evolve.initial == "coherent-ss") {
    out.alpha = cdouble(std::sqrt(out.steady_photons), 0.0);
    rho0 = coherent_state(out.alpha, cut.cutoff);
  } else if (c.evolve.initial == "coherent") {
    out.alpha = c.evolve.alpha;
    rho0 = coherent_state(out.alpha, cut.cutoff);
  }
  EvolveOptions options;
  options.integrator.rtol = c.numerics.rtol;
  options.integrator.atol = c.numerics.atol;
  options.keep_states = keep_states;
  out.method = c.evolve.method;
  if (out.method == "auto") out.method = c.model == ModelKind::Laser ? "sectorwise" : "full";
  const auto obs = standard_observables(cut.cutoff);
  if (out.method == "sectorwise") {
    const Index kmax = c.evolve.method == "auto" ? cut.cutoff - 1 : std::min<Index>(c.numerics.kmax, cut.cutoff - 1);
    out.trace = evolve_sectorwise(model, rho0, times, kmax, obs, options);
  } else {
    out.trace = evolve(model, rho0, times, obs, options);
  }
  return out;
}

double log_slope(const std::vector<double>& t, const std::vector<double>& y) {
  double st = 0, sy = 0, stt = 0, sty = 0;
  int n = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(y[i] > 1e-300)) continue;
    const double ly = std::log(y[i]);
    st += t[i];
    sy += ly;
    stt += t[i] * t[i];
    sty += t[i] * ly;
    ++n;
  }
  if (n < 2) return std::nan("");
  return -(n * sty - st * sy) / (n * stt - st * st);
}

/// First time y falls to y[0]/e, linearly interpolated; null when it never does.
json one_over_e_time(const std::vector<double>& t, const std::vector<double>& y) {
  const double target = y.front() / std::numbers::e;
  for (std::size_t i = 1; i < y.size(); ++i) {
    if (y[i] <= target) return t[i - 1] + (t[i] - t[i - 1]) * (y[i - 1] - target) / (y[i - 1] - y[i]);
  }
  return nullptr;
}

json integrity_json(const EvolutionTrace& trace) {
  json j{{"max_trace_deviation", trace.integrity.max_trace_deviation},
         {"max_hermiticity_deviation", trace.integrity.max_hermiticity_deviation},
         {"steps_accepted", trace.stats.accepted},
         {"steps_rejected", trace.stats.rejected}};
  j["min_eigenvalue"] = std::isfinite(trace.integrity.min_eigenvalue) ? json(trace.integrity.min_eigenvalue) : json();
  return j;
}

void run_evolve(Context& ctx) {
  const RunConfig& c = ctx.config;
  const auto traj = run_trajectory(c, record_times(c.evolve.t_final, c.evolve.records), false);
  const auto& tr = traj.trace;
  CsvTable table{{"t", "n", "re_a", "im_a", "abs_a", "re_a2", "im_a2", "abs_a2"}, {}};
  std::vector<double> abs_a;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    const cdouble n = tr.observables.at("n")[i];
    const cdouble a = tr.observables.at("a")[i];
    const cdouble a2 = tr.observables.at("a2")[i];
    abs_a.push_back(std::abs(a));
    table.rows.push_back({tr.times[i], n.real(), a.real(), a.imag(), std::abs(a), a2.real(), a2.imag(), std::abs(a2)});
  }
  ctx.csv(table, "evolve.csv");
  ctx.summary["cutoff"] = traj.cutoff;
  ctx.summary["convergence_table"] = table_json(traj.table);
  ctx.summary["observables"] = {{"initial_alpha", complex_json(traj.alpha)},
                                {"steady_photon_number", traj.steady_photons},
                                {"method", traj.method},
                                {"photon_number_final", tr.observables.at("n").back().real()},
                                {"abs_a_final", abs_a.back()},
                                {"abs_a_decay_rate", log_slope(tr.times, abs_a)},
                                {"abs_a_one_over_e_time", one_over_e_time(tr.times, abs_a)},
                                {"integrity", integrity_json(tr)}};
  ctx.summary["gaps_by_sector"] = json::object();
}

double default_extent(double photons) { return std::sqrt(std::max(photons, 0.0)) + 3.5; }

WignerGridSpec wigner_spec(const RunConfig& c, double photons) {
  const double w = c.wigner.extent.value_or(default_extent(photons));
  WignerGridSpec spec;
  spec.re_min = spec.im_min = -w;
  spec.re_max = spec.im_max = w;
  spec.re_points = spec.im_points = c.wigner.points;
  return spec;
}

CsvTable wigner_table(const WignerGrid& grid) {
  CsvTable table{{"re_alpha", "im_alpha", "w"}, {}};
  for (Index i = 0; i < grid.re_alpha.size(); ++i)
    for (Index j = 0; j < grid.im_alpha.size(); ++j) table.rows.push_back({grid.re_alpha(i), grid.im_alpha(j), grid.values(i, j)});
  return table;
}

json wigner_json(const WignerGrid& grid) {
  return {{"normalization", grid.normalization()},
          {"max_imag_residue", grid.max_imag_residue},
          {"min_w", grid.values.minCoeff()},
          {"max_w", grid.values.maxCoeff()}};
}

void run_wigner(Context& ctx) {
  const RunConfig& c = ctx.config;
  json snapshots = json::array();
  if (c.wigner.state == "steady") {
    const auto cut = resolve_cutoff(c);
    const auto rho = steady_state(build_model(c, cut.cutoff), steady_options(c));
    const double n = photon_number(rho);
    const auto grid = wigner(rho, wigner_spec(c, n), c.numerics.workers);
    ctx.csv(wigner_table(grid), "wigner.csv");
    json s = wigner_json(grid);
    s["file"] = "wigner.csv";
    snapshots.push_back(s);
    ctx.summary["cutoff"] = cut.cutoff;
    ctx.summary["convergence_table"] = table_json(cut.table);
    ctx.summary["observables"] = {{"photon_number", n}, {"snapshots", snapshots}};
  } else {
    std::vector<double> times = c.wigner.times;
    const bool has_zero = times.front() == 0.0;
    if (!has_zero) times.insert(times.begin(), 0.0);
    if (times.size() < 2) times.push_back(std::max(1e-9, times.back()));
    const auto traj = run_trajectory(c, times, true);
    const double n_ref = std::max(traj.steady_photons, std::norm(traj.alpha));
    const WignerEvaluator eval(wigner_spec(c, n_ref), traj.cutoff, c.numerics.workers);
    for (std::size_t i = has_zero ? 0 : 1, idx = 0; i < traj.trace.states.size() && idx < c.wigner.times.size();
         ++i, ++idx) {
      const OperatorXcd& m = traj.trace.states[i];
      const DensityMatrixXcd rho(OperatorXcd((m + m.adjoint()) / 2.0), std::max(1e-7, 10.0 * c.numerics.rtol));
      const auto grid = eval(rho);
      char name[32];
      std::snprintf(name, sizeof name, "wigner_%03zu.csv", idx);
      ctx.csv(wigner_table(grid), name);
      json s = wigner_json(grid);
      s["file"] = name;
      s["t"] = c.wigner.times[idx];
      snapshots.push_back(s);
    }
    ctx.summary["cutoff"] = traj.cutoff;
    ctx.summary["convergence_table"] = table_json(traj.table);
    ctx.summary["observables"] = {{"initial_alpha", complex_json(traj.alpha)},
                                  {"steady_photon_number", traj.steady_photons},
                                  {"snapshots", snapshots},
                                  {"integrity", integrity_json(traj.trace)}};
  }
  ctx.summary["gaps_by_sector"] = json::object();
}

struct SweepPoint {
  double param = 0.0;
  double n = 0.0;
  double rate = 0.0;
};

struct SweepResult {
  double photons_rescaled = 0.0;
  double gap_k0 = 0.0;
  double gap_k1 = 0.0;
};

void run_sweep(Context& ctx) {
  const RunConfig& c = ctx.config;
  const auto& sw = c.sweep;
  std::vector<std::pair<double, double>> bases;
  for (double n : sw.n_values)
    for (double p : sw.grid) bases.emplace_back(n, p);
  auto config_at = [&](double n, double p, double rate) {
    RunConfig local = c;
    local.set_n(n);
    local.set_model_parameter(sw.parameter, p);
    local.set_rate(rate);
    return local;
  };
  const auto cutoffs = parallel_map(bases.size(), c.numerics.workers, [&](std::size_t i) {
    return resolve_cutoff(config_at(bases[i].first, bases[i].second, 0.0));
  });

  std::vector<SweepPoint> points;
  std::vector<std::size_t> base_index;
  for (double rate : sw.rates)
    for (std::size_t b = 0; b < bases.size(); ++b) {
      points.push_back({bases[b].second, bases[b].first, rate});
      base_index.push_back(b);
    }
  const auto results = parallel_map(points.size(), c.numerics.workers, [&](std::size_t i) {
    const auto& pt = points[i];
    const RunConfig local = config_at(pt.n, pt.param, pt.rate);
    const Index cutoff = cutoffs[base_index[i]].cutoff;
    const auto model = build_model(local, cutoff);
    const Generator<double> gen(model);
    const auto b0 = sector_liouvillian(gen, symmetric_sector(model.symmetry(), cutoff), sector_options(c));
    const auto rho = steady_state(b0, steady_options(c));
    const SymmetrySector s1 = model.symmetry() == SymmetryKind::U1 ? u1_sector(cutoff, 1) : z2_sector(cutoff, 1);
    SweepResult r;
    r.photons_rescaled = photon_number(rho) / pt.n;
    r.gap_k0 = std::abs(slowest_rate(b0).real());
    r.gap_k1 = std::abs(slowest_rate(sector_liouvillian(gen, s1, sector_options(c))).real());
    return r;
  });

  CsvTable table{{"param", "N", "eta_or_zeta", "n_photon_rescaled", "gap_k0", "gap_k1"}, {}};
  for (std::size_t i = 0; i < points.size(); ++i)
    table.rows.push_back({points[i].param, points[i].n, points[i].rate, results[i].photons_rescaled, results[i].gap_k0,
                          results[i].gap_k1});
  ctx.csv(table, "sweep.csv");

  json conv = json::array();
  for (std::size_t b = 0; b < bases.size(); ++b)
    conv.push_back({{"N", bases[b].first},
                    {sw.parameter, bases[b].second},
                    {"cutoff", cutoffs[b].cutoff},
                    {"table", table_json(cutoffs[b].table)}});
  json witnesses = json::array();
  json gaps = json::array();
  for (std::size_t start = 0; start < points.size(); start += sw.grid.size()) {
    std::vector<double> values, g0, g1;
    for (std::size_t j = 0; j < sw.grid.size(); ++j) {
      values.push_back(results[start + j].photons_rescaled);
      g0.push_back(results[start + j].gap_k0);
      g1.push_back(results[start + j].gap_k1);
    }
    json w{{"N", points[start].n}, {"eta_or_zeta", points[start].rate}};
    try {
      const auto peak = second_derivative_peak(sw.grid, values);
      w["peak_location"] = peak.peak_location;
      w["peak_second_derivative"] = peak.peak_value;
      w["spacing"] = peak.spacing;
    } catch (const InvalidArgument& e) {
      w["skipped"] = e.what();
    }
    witnesses.push_back(w);
    gaps.push_back({{"N", points[start].n},
                    {"eta_or_zeta", points[start].rate},
                    {"min_gap_k0", *std::min_element(g0.begin(), g0.end())},
                    {"min_gap_k1", *std::min_element(g1.begin(), g1.end())}});
  }
  ctx.summary["cutoff"] = c.numerics.cutoff ? json(*c.numerics.cutoff) : json("auto");
  ctx.summary["convergence_table"] = conv;
  ctx.summary["observables"] = {{"criticality_witness", witnesses}, {"points", points.size()}};
  ctx.summary["gaps_by_sector"] = gaps;
}

void run_sectors_check(Context& ctx) {
  const RunConfig& c = ctx.config;
  const auto cut = resolve_cutoff(c);
  const auto report = sectors_check(c, cut.cutoff);
  std::string text = report.text();
  if (ctx.comment) text = *ctx.comment + "\n" + text;
  write_file(ctx.path("sectors_check.txt"), text);
  ctx.report.files.push_back(ctx.path("sectors_check.txt"));
  json sectors = json::array();
  json gaps = json::object();
  for (const auto& s : report.sectors) {
    sectors.push_back({{"k", s.k},
                       {"max_action", s.max_action},
                       {"shift", complex_json(s.shift)},
                       {"expected_shift", s.expected},
                       {"deviation", s.deviation}});
  }
  ctx.summary["cutoff"] = cut.cutoff;
  ctx.summary["convergence_table"] = table_json(cut.table);
  ctx.summary["observables"] = {{"passed", report.passed},
                                {"weak_symmetry_passed", report.weak.passed},
                                {"max_leakage", report.weak.max_leakage},
                                {"removal_operator", report.removal_operator},
                                {"removal_rate", report.removal_rate},
                                {"removal_passed", report.removal_passed},
                                {"shift_law_passed", report.shift_law_passed},
                                {"sectors", sectors}};
  ctx.summary["gaps_by_sector"] = gaps;
}

}  // namespace

SectorsCheckReport sectors_check(const RunConfig& c, Index cutoff) {
  RunConfig base_config = c;
  base_config.set_rate(0.0);
  const auto base = build_model(base_config, cutoff);
  const double rate = c.rate() > 0.0 ? c.rate() : c.sectors_check.rate;
  SectorsCheckReport r;
  r.cutoff = cutoff;
  r.removal_rate = rate;
  OperatorXcd symmetry, added;
  std::vector<SymmetrySector> sectors;
  if (c.model == ModelKind::Laser) {
    symmetry = phase_rotation(c.sectors_check.phi, cutoff);
    r.symmetry_operator = "exp(i phi a^dagger a), phi = " + format_double(c.sectors_check.phi);
    sectors = u1_sectors(cutoff, std::min<Index>(c.numerics.kmax, cutoff - 1));
  } else {
    symmetry = parity(cutoff);
    r.symmetry_operator = "exp(i pi a^dagger a)";
    sectors = z2_sectors(cutoff);
  }
  const bool decay = c.sectors_check.removal == "decay";
  if (decay) {
    added = std::sqrt(rate) * annihilation(cutoff);
    r.removal_operator = "sqrt(rate) a";
  } else if (c.model == ModelKind::Laser) {
    added = dephasing_jump(rate, cutoff);
    r.removal_operator = "sqrt(eta/4) a a^dagger";
  } else {
    added = parity_jump(rate, cutoff);
    r.removal_operator = "sqrt(zeta) J";
  }
  r.weak = verify_weak_symmetry(base, symmetry, c.numerics.leakage_tolerance);
  const auto removal = ssb_removal_check(base, added, sectors);
  r.removal_passed = removal.passed;
  r.shift_law_passed = true;
  SectorOptions opts;
  opts.leakage_tolerance = c.numerics.leakage_tolerance;
  for (const auto& action : removal.sectors) {
    if (action.sector.k < 0) continue;
    SectorShiftRow row;
    row.k = action.sector.k;
    row.max_action = action.max_action;
    const auto shift = measure_sector_shift(base, added, action.sector, opts);
    row.shift = shift.shift;
    row.deviation = shift.deviation;
    const double k = action.sector.k;
    if (c.model == ModelKind::Laser) {
      row.expected = -rate * k * k / 8.0;
    } else {
      row.expected = action.sector.k == 1 ? -2.0 * rate : 0.0;
    }
    const bool holds = std::abs(row.shift - cdouble(row.expected)) < 1e-9 && row.deviation < 1e-9;
    r.shift_law_passed = r.shift_law_passed && holds;
    r.sectors.push_back(row);
  }
  r.passed = r.weak.passed && r.removal_passed && r.shift_law_passed;
  return r;
}

std::string SectorsCheckReport::text() const {
  std::ostringstream os;
  auto verdict = [](bool ok) { return ok ? "PASS" : "FAIL"; };
  os << "cutoff " << cutoff << "\n";
  os << "weak_symmetry " << verdict(weak.passed) << " operator=\"" << symmetry_operator
     << "\" max_leakage=" << format_double(weak.max_leakage) << " tolerance=" << format_double(weak.tolerance)
     << "\n";
  os << "ssb_removal " << verdict(removal_passed) << " operator=\"" << removal_operator
     << "\" rate=" << format_double(removal_rate) << "\n";
  for (const auto& s : sectors) {
    os << "sector k=" << s.k << " max_action=" << format_double(s.max_action)
       << " shift=" << format_double(s.shift.real()) << (s.shift.imag() < 0 ? "-" : "+")
       << format_double(std::abs(s.shift.imag())) << "i expected=" << format_double(s.expected)
       << " deviation=" << format_double(s.deviation) << "\n";
  }
  os << "shift_law " << verdict(shift_law_passed) << "\n";
  os << "overall " << verdict(passed) << "\n";
  return os.str();
}

RunReport run(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  config.validate();
  Context ctx{config, std::nullopt, {}, json::object()};
  if (config.output.timestamp) ctx.comment = timestamp_comment();
  ctx.report.dir = config.output.dir;
  try {
    std::filesystem::create_directories(config.output.dir);
  } catch (const std::filesystem::filesystem_error& e) {
    throw IoError(std::string("cannot create output directory: ") + e.what());
  }
  write_file(ctx.path("effective_config.toml"), effective_config_toml(config));
  ctx.report.files.push_back(ctx.path("effective_config.toml"));

  std::vector<std::string> warnings;
  std::mutex warn_mutex;
  auto previous = set_warning_handler([&](const std::string& message) {
    {
      std::lock_guard<std::mutex> lock(warn_mutex);
      warnings.push_back(message);
    }
    std::cerr << "warning: " << message << "\n";
  });
  struct Restore {
    WarningHandler& handler;
    ~Restore() { set_warning_handler(handler); }
  } restore{previous};

  ctx.summary["task"] = to_string(config.task);
  ctx.summary["model"] = to_string(config.model);
  ctx.summary["params"] = params_json(config);
  switch (config.task) {
    case Task::Steady: run_steady(ctx); break;
    case Task::Spectrum: run_spectrum(ctx); break;
    case Task::Evolve: run_evolve(ctx); break;
    case Task::Wigner: run_wigner(ctx); break;
    case Task::Sweep: run_sweep(ctx); break;
    case Task::SectorsCheck: run_sectors_check(ctx); break;
  }
  ctx.summary["warnings"] = warnings;
  ctx.summary["versions"] = {{"dptlab", "0.1.0"},
                             {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                           "." + std::to_string(EIGEN_MINOR_VERSION)}};
  ctx.summary["wall_time_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_file(ctx.path("summary.json"), ctx.summary.dump(2) + "\n");
  ctx.report.files.push_back(ctx.path("summary.json"));
  return ctx.report;
}

}  // namespace dptlab::cli
