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

#include "dptlab/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <toml.hpp>

namespace dptlab::cli {

const char* to_string(Task task) {
  switch (task) {
    case Task::Steady: return "steady";
    case Task::Spectrum: return "spectrum";
    case Task::Evolve: return "evolve";
    case Task::Wigner: return "wigner";
    case Task::Sweep: return "sweep";
    case Task::SectorsCheck: return "sectors-check";
  }
  return "?";
}

const char* to_string(ModelKind kind) { return kind == ModelKind::Laser ? "laser" : "kerr"; }

std::vector<std::string> task_names() { return {"steady", "spectrum", "evolve", "wigner", "sweep", "sectors-check"}; }

Task parse_task(const std::string& name) {
  for (Task t : {Task::Steady, Task::Spectrum, Task::Evolve, Task::Wigner, Task::Sweep, Task::SectorsCheck})
    if (name == to_string(t)) return t;
  throw ConfigError("unknown task '" + name + "' (expected steady, spectrum, evolve, wigner, sweep or sectors-check)");
}

double RunConfig::n() const { return model == ModelKind::Laser ? laser.N : kerr.N; }
double RunConfig::rate() const { return model == ModelKind::Laser ? laser.eta : kerr.zeta; }

void RunConfig::set_n(double value) {
  laser.N = value;
  kerr.N = value;
}

void RunConfig::set_rate(double value) {
  if (model == ModelKind::Laser) {
    laser.eta = value;
  } else {
    kerr.zeta = value;
  }
}

namespace {

std::map<std::string, double*> laser_fields(LaserConfig& c) {
  return {{"A", &c.A}, {"B", &c.B}, {"omega", &c.omega}, {"eta", &c.eta}, {"N", &c.N}};
}

std::map<std::string, double*> kerr_fields(KerrConfig& c) {
  return {{"Delta", &c.Delta}, {"G", &c.G}, {"U", &c.U}, {"zeta", &c.zeta}, {"N", &c.N}};
}

std::map<std::string, double*> model_fields(RunConfig& c) {
  return c.model == ModelKind::Laser ? laser_fields(c.laser) : kerr_fields(c.kerr);
}

std::string field_list(const std::map<std::string, double*>& fields) {
  std::string out;
  for (const auto& [name, ptr] : fields) out += (out.empty() ? "" : ", ") + name;
  return out;
}

}  // namespace

void RunConfig::set_model_parameter(const std::string& name, double value) {
  auto fields = model_fields(*this);
  auto it = fields.find(name);
  if (it == fields.end()) {
    throw ConfigError("unknown " + std::string(to_string(model)) + " parameter '" + name + "' (expected one of " +
                      field_list(fields) + ")");
  }
  *it->second = value;
}

double RunConfig::model_parameter(const std::string& name) const {
  auto copy = *this;
  auto fields = model_fields(copy);
  auto it = fields.find(name);
  if (it == fields.end()) throw ConfigError("unknown " + std::string(to_string(model)) + " parameter '" + name + "'");
  return *it->second;
}

void RunConfig::validate() const {
  try {
    if (model == ModelKind::Laser) {
      LaserConfig probe = laser;
      probe.cutoff = numerics.cutoff.value_or(10);
      probe.validate();
    } else {
      KerrConfig probe = kerr;
      probe.cutoff = numerics.cutoff.value_or(10);
      probe.validate();
    }
  } catch (const Error& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  auto require = [](bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
  };
  require(numerics.cutoff_tolerance > 0.0, "numerics.cutoff_tolerance must be positive");
  require(numerics.kmax >= 0, "numerics.kmax must be nonnegative");
  if (numerics.cutoff) require(numerics.kmax <= *numerics.cutoff - 1, "numerics.kmax must be below the cutoff");
  require(numerics.spectrum_count >= 1, "numerics.spectrum_count must be at least 1");
  require(numerics.gap_floor > 0.0, "numerics.gap_floor must be positive");
  require(numerics.leakage_tolerance > 0.0, "numerics.leakage_tolerance must be positive");
  require(numerics.rtol > 0.0 && numerics.atol > 0.0, "numerics.rtol and numerics.atol must be positive");
  require(numerics.workers >= 1, "numerics.workers must be at least 1");
  if (task == Task::Sweep) {
    const std::string expected = model == ModelKind::Laser ? "A" : "G";
    require(sweep.parameter == expected, "sweep.parameter must be '" + expected + "' for the " + to_string(model) +
                                             " model");
    require(!sweep.grid.empty(), "sweep grid must be nonempty");
    require(!sweep.n_values.empty(), "sweep.N must be nonempty");
    require(!sweep.rates.empty(), "sweep.rates must be nonempty");
    for (double g : sweep.grid) require(std::isfinite(g) && g > 0.0, "sweep grid values must be positive");
    for (std::size_t i = 1; i < sweep.grid.size(); ++i)
      require(sweep.grid[i] > sweep.grid[i - 1], "sweep grid must be strictly increasing");
    for (double n : sweep.n_values) require(std::isfinite(n) && n > 0.0, "sweep.N values must be positive");
    for (double r : sweep.rates) require(std::isfinite(r) && r >= 0.0, "sweep.rates must be nonnegative");
  }
  require(evolve.t_final > 0.0, "evolve.t_final must be positive");
  require(evolve.records >= 2, "evolve.records must be at least 2");
  require(evolve.initial == "coherent-ss" || evolve.initial == "coherent" || evolve.initial == "vacuum",
          "evolve.initial must be coherent-ss, coherent or vacuum");
  require(evolve.method == "auto" || evolve.method == "full" || evolve.method == "sectorwise",
          "evolve.method must be auto, full or sectorwise");
  require(!(evolve.method == "sectorwise" && model == ModelKind::Kerr),
          "evolve.method = sectorwise needs the U1 laser model");
  require(wigner.state == "steady" || wigner.state == "evolved", "wigner.state must be steady or evolved");
  require(!wigner.times.empty(), "wigner.times must be nonempty");
  for (double t : wigner.times) require(std::isfinite(t) && t >= 0.0, "wigner.times must be nonnegative");
  for (std::size_t i = 1; i < wigner.times.size(); ++i)
    require(wigner.times[i] > wigner.times[i - 1], "wigner.times must be strictly increasing");
  if (wigner.extent) require(*wigner.extent > 0.0, "wigner.extent must be positive");
  require(wigner.points >= 2, "wigner.points must be at least 2");
  require(sectors_check.removal == "default" || sectors_check.removal == "decay",
          "sectors_check.removal must be default or decay");
  require(sectors_check.rate > 0.0, "sectors_check.rate must be positive");
}

RunConfig preset_config(const std::string& name) {
  RunConfig c;
  if (name == "laser-fig1") {
    c.model = ModelKind::Laser;
    c.laser = laser_fig1_preset();
    c.sweep.parameter = "A";
    for (int i = 1; i <= 40; ++i) c.sweep.grid.push_back(0.05 * i);
    c.sweep.n_values = {1, 2, 5, 10};
    c.sweep.rates = {0.0, 0.2};
    c.evolve.t_final = 50.0;
    c.wigner.state = "evolved";
    c.wigner.times = {0.0, 10.0, 50.0};
  } else if (name == "kerr-fig2") {
    c.model = ModelKind::Kerr;
    c.kerr = kerr_fig2_preset();
    c.numerics.cutoff_tolerance = 1e-8;
    c.sweep.parameter = "G";
    for (int i = 1; i <= 25; ++i) c.sweep.grid.push_back(0.5 * i);
    c.sweep.n_values = {1, 2, 3};
    c.sweep.rates = {0.0, 0.2};
    c.evolve.t_final = 10.0;
    c.wigner.state = "evolved";
    c.wigner.times = {0.0, 2.0, 10.0};
  } else {
    throw ConfigError("unknown preset '" + name + "' (expected laser-fig1 or kerr-fig2)");
  }
  c.numerics.cutoff.reset();
  return c;
}

namespace {

class Reader {
 public:
  Reader(const toml::table& root, std::string origin) : root_(root), origin_(std::move(origin)) {}

  [[noreturn]] void fail(const toml::node* node, const std::string& field, const std::string& message) const {
    std::ostringstream os;
    os << origin_;
    if (node != nullptr && node->source().begin) {
      os << ":" << node->source().begin.line << ":" << node->source().begin.column;
    }
    os << ": field " << field << ": " << message;
    throw ConfigError(os.str());
  }

  const toml::table* section(const std::string& name, const std::set<std::string>& allowed) const {
    const toml::node* node = root_.get(name);
    if (node == nullptr) return nullptr;
    const toml::table* tbl = node->as_table();
    if (tbl == nullptr) fail(node, name, "expected a table");
    for (const auto& [key, value] : *tbl) {
      if (!allowed.count(std::string(key.str()))) {
        fail(&value, name + "." + std::string(key.str()), "unknown key");
      }
    }
    return tbl;
  }

  std::optional<double> number(const toml::table* tbl, const std::string& sec, const std::string& key) const {
    if (tbl == nullptr) return std::nullopt;
    const toml::node* node = tbl->get(key);
    if (node == nullptr) return std::nullopt;
    if (auto v = node->value<double>(); v && (node->is_floating_point() || node->is_integer())) return *v;
    fail(node, sec + "." + key, "expected a number");
  }

  std::optional<long long> integer(const toml::table* tbl, const std::string& sec, const std::string& key) const {
    if (tbl == nullptr) return std::nullopt;
    const toml::node* node = tbl->get(key);
    if (node == nullptr) return std::nullopt;
    if (auto v = node->value<long long>(); v && node->is_integer()) return *v;
    fail(node, sec + "." + key, "expected an integer");
  }

  std::optional<std::string> string(const toml::table* tbl, const std::string& sec, const std::string& key) const {
    if (tbl == nullptr) return std::nullopt;
    const toml::node* node = tbl->get(key);
    if (node == nullptr) return std::nullopt;
    if (auto v = node->value<std::string>(); v && node->is_string()) return *v;
    fail(node, sec + "." + key, "expected a string");
  }

  std::optional<bool> boolean(const toml::table* tbl, const std::string& sec, const std::string& key) const {
    if (tbl == nullptr) return std::nullopt;
    const toml::node* node = tbl->get(key);
    if (node == nullptr) return std::nullopt;
    if (auto v = node->value<bool>(); v && node->is_boolean()) return *v;
    fail(node, sec + "." + key, "expected a boolean");
  }

  std::optional<std::vector<double>> numbers(const toml::table* tbl, const std::string& sec,
                                             const std::string& key) const {
    if (tbl == nullptr) return std::nullopt;
    const toml::node* node = tbl->get(key);
    if (node == nullptr) return std::nullopt;
    const toml::array* arr = node->as_array();
    if (arr == nullptr) fail(node, sec + "." + key, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& item : *arr) {
      auto v = item.value<double>();
      if (!v || !(item.is_floating_point() || item.is_integer())) fail(&item, sec + "." + key, "expected a number");
      out.push_back(*v);
    }
    return out;
  }

  const toml::node* node(const toml::table* tbl, const std::string& key) const {
    return tbl == nullptr ? nullptr : tbl->get(key);
  }

 private:
  const toml::table& root_;
  std::string origin_;
};

std::vector<double> uniform_grid(double start, double stop, double step) {
  if (!(step > 0.0) || !(stop >= start)) throw ConfigError("sweep range needs step > 0 and stop >= start");
  const long count = std::lround(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> out;
  for (long i = 0; i < count; ++i) out.push_back(start + double(i) * step);
  return out;
}

std::optional<Index> parse_cutoff_text(const std::string& text) {
  if (text == "auto") return std::nullopt;
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    if (v < 2) throw ConfigError("cutoff must be 'auto' or an integer >= 2, got " + text);
    return static_cast<Index>(v);
  } catch (const std::logic_error&) {
    throw ConfigError("cutoff must be 'auto' or an integer >= 2, got '" + text + "'");
  }
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& origin, const std::optional<std::string>& preset) {
  toml::table root;
  try {
    root = toml::parse(text, origin);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << origin << ":" << e.source().begin.line << ":" << e.source().begin.column << ": " << e.description();
    throw ConfigError(os.str());
  }
  for (const auto& [key, value] : root) {
    static const std::set<std::string> top{"task", "model", "numerics", "sweep", "evolve", "wigner", "sectors_check",
                                           "output"};
    if (!top.count(std::string(key.str()))) {
      Reader(root, origin).fail(&value, std::string(key.str()), "unknown key");
    }
  }
  const Reader r(root, origin);
  const auto* model = r.section("model", {"name", "preset", "A", "B", "omega", "eta", "Delta", "G", "U", "zeta",
                                          "N"});
  const auto* numerics = r.section("numerics", {"cutoff", "cutoff_tolerance", "kmax", "spectrum_count", "gap_floor",
                                                "leakage_tolerance", "rtol", "atol", "workers"});
  const auto* sweep = r.section("sweep", {"parameter", "grid", "start", "stop", "step", "N", "rates"});
  const auto* evolve = r.section("evolve", {"t_final", "records", "initial", "alpha", "method"});
  const auto* wigner = r.section("wigner", {"state", "times", "extent", "points"});
  const auto* sc = r.section("sectors_check", {"removal", "rate", "phi"});
  const auto* output = r.section("output", {"dir", "timestamp"});

  std::optional<std::string> preset_name = preset;
  if (!preset_name) preset_name = r.string(model, "model", "preset");
  RunConfig c;
  if (preset_name) c = preset_config(*preset_name);

  if (const toml::node* t = root.get("task")) {
    auto v = t->value<std::string>();
    if (!v) r.fail(t, "task", "expected a string");
    try {
      c.task = parse_task(*v);
    } catch (const ConfigError& e) {
      r.fail(t, "task", e.what());
    }
  }

  if (auto name = r.string(model, "model", "name")) {
    if (*name == "laser") {
      c.model = ModelKind::Laser;
    } else if (*name == "kerr") {
      c.model = ModelKind::Kerr;
    } else {
      r.fail(r.node(model, "name"), "model.name", "expected laser or kerr");
    }
  }
  if (model != nullptr) {
    for (const auto& [key, value] : *model) {
      const std::string k(key.str());
      if (k == "name" || k == "preset") continue;
      const double v = *r.number(model, "model", k);
      try {
        c.set_model_parameter(k, v);
      } catch (const ConfigError& e) {
        r.fail(&value, "model." + k, e.what());
      }
    }
  }

  if (const toml::node* node = r.node(numerics, "cutoff")) {
    if (auto s = node->value<std::string>(); s && node->is_string()) {
      try {
        c.numerics.cutoff = parse_cutoff_text(*s);
      } catch (const ConfigError& e) {
        r.fail(node, "numerics.cutoff", e.what());
      }
    } else if (auto i = node->value<long long>(); i && node->is_integer()) {
      if (*i < 2) r.fail(node, "numerics.cutoff", "must be 'auto' or an integer >= 2");
      c.numerics.cutoff = static_cast<Index>(*i);
    } else {
      r.fail(node, "numerics.cutoff", "expected 'auto' or an integer");
    }
  }
  if (auto v = r.number(numerics, "numerics", "cutoff_tolerance")) c.numerics.cutoff_tolerance = *v;
  if (auto v = r.integer(numerics, "numerics", "kmax")) c.numerics.kmax = static_cast<Index>(*v);
  if (auto v = r.integer(numerics, "numerics", "spectrum_count")) c.numerics.spectrum_count = static_cast<Index>(*v);
  if (auto v = r.number(numerics, "numerics", "gap_floor")) c.numerics.gap_floor = *v;
  if (auto v = r.number(numerics, "numerics", "leakage_tolerance")) c.numerics.leakage_tolerance = *v;
  if (auto v = r.number(numerics, "numerics", "rtol")) c.numerics.rtol = *v;
  if (auto v = r.number(numerics, "numerics", "atol")) c.numerics.atol = *v;
  if (auto v = r.integer(numerics, "numerics", "workers")) {
    if (*v < 1) r.fail(r.node(numerics, "workers"), "numerics.workers", "must be at least 1");
    c.numerics.workers = static_cast<std::size_t>(*v);
  }

  if (auto v = r.string(sweep, "sweep", "parameter")) c.sweep.parameter = *v;
  if (auto v = r.numbers(sweep, "sweep", "grid")) {
    if (r.node(sweep, "start") || r.node(sweep, "stop") || r.node(sweep, "step")) {
      r.fail(r.node(sweep, "grid"), "sweep.grid", "give either grid or start/stop/step, not both");
    }
    c.sweep.grid = *v;
  } else if (sweep != nullptr && (r.node(sweep, "start") || r.node(sweep, "stop") || r.node(sweep, "step"))) {
    const auto start = r.number(sweep, "sweep", "start");
    const auto stop = r.number(sweep, "sweep", "stop");
    const auto step = r.number(sweep, "sweep", "step");
    if (!start || !stop || !step) r.fail(sweep, "sweep", "start, stop and step must all be given");
    try {
      c.sweep.grid = uniform_grid(*start, *stop, *step);
    } catch (const ConfigError& e) {
      r.fail(sweep, "sweep", e.what());
    }
  }
  if (auto v = r.numbers(sweep, "sweep", "N")) c.sweep.n_values = *v;
  if (auto v = r.numbers(sweep, "sweep", "rates")) c.sweep.rates = *v;

  if (auto v = r.number(evolve, "evolve", "t_final")) c.evolve.t_final = *v;
  if (auto v = r.integer(evolve, "evolve", "records")) c.evolve.records = static_cast<Index>(*v);
  if (auto v = r.string(evolve, "evolve", "initial")) c.evolve.initial = *v;
  if (auto v = r.numbers(evolve, "evolve", "alpha")) {
    if (v->size() != 2) r.fail(r.node(evolve, "alpha"), "evolve.alpha", "expected [re, im]");
    c.evolve.alpha = cdouble((*v)[0], (*v)[1]);
  }
  if (auto v = r.string(evolve, "evolve", "method")) c.evolve.method = *v;

  if (auto v = r.string(wigner, "wigner", "state")) c.wigner.state = *v;
  if (auto v = r.numbers(wigner, "wigner", "times")) c.wigner.times = *v;
  if (auto v = r.number(wigner, "wigner", "extent")) c.wigner.extent = *v;
  if (auto v = r.integer(wigner, "wigner", "points")) c.wigner.points = static_cast<Index>(*v);

  if (auto v = r.string(sc, "sectors_check", "removal")) c.sectors_check.removal = *v;
  if (auto v = r.number(sc, "sectors_check", "rate")) c.sectors_check.rate = *v;
  if (auto v = r.number(sc, "sectors_check", "phi")) c.sectors_check.phi = *v;

  if (auto v = r.string(output, "output", "dir")) c.output.dir = *v;
  if (auto v = r.boolean(output, "output", "timestamp")) c.output.timestamp = *v;
  return c;
}

void apply_overrides(RunConfig& c, const Overrides& o) {
  if (o.task) c.task = parse_task(*o.task);
  for (const auto& p : o.params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--param expects NAME=VALUE, got '" + p + "'");
    const std::string name = p.substr(0, eq);
    const std::string text = p.substr(eq + 1);
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
    } catch (const std::logic_error&) {
      throw ConfigError("--param " + name + ": '" + text + "' is not a number");
    }
    c.set_model_parameter(name, value);
  }
  if (o.n) c.set_n(*o.n);
  if (o.eta) {
    if (c.model != ModelKind::Laser) throw ConfigError("--eta applies to the laser model; use --zeta for Kerr");
    c.laser.eta = *o.eta;
  }
  if (o.zeta) {
    if (c.model != ModelKind::Kerr) throw ConfigError("--zeta applies to the Kerr model; use --eta for the laser");
    c.kerr.zeta = *o.zeta;
  }
  if (o.cutoff) c.numerics.cutoff = parse_cutoff_text(*o.cutoff);
  if (o.kmax) c.numerics.kmax = *o.kmax;
  if (o.out) c.output.dir = *o.out;
  if (o.workers) c.numerics.workers = *o.workers;
  if (o.no_timestamp) c.output.timestamp = false;
}

RunConfig load_config(const std::optional<std::filesystem::path>& file, const Overrides& overrides) {
  RunConfig c;
  if (file) {
    std::ifstream in(*file, std::ios::binary);
    if (!in) throw IoError("cannot read config file " + file->string());
    std::ostringstream text;
    text << in.rdbuf();
    c = parse_config(text.str(), file->string(), overrides.preset);
  } else if (overrides.preset) {
    c = preset_config(*overrides.preset);
  } else {
    throw ConfigError("either --config or --preset is required");
  }
  apply_overrides(c, overrides);
  if (c.task == Task::Sweep) {
    if (c.sweep.parameter.empty()) c.sweep.parameter = c.model == ModelKind::Laser ? "A" : "G";
    if (c.sweep.n_values.empty()) c.sweep.n_values = {c.n()};
    if (c.sweep.rates.empty()) c.sweep.rates = {c.rate()};
  }
  c.validate();
  return c;
}

std::string effective_config_toml(const RunConfig& c) {
  auto array = [](const std::vector<double>& v) {
    toml::array a;
    for (double x : v) a.push_back(x);
    return a;
  };
  toml::table model{{"name", to_string(c.model)}};
  auto copy = c;
  for (const auto& [name, ptr] : model_fields(copy)) model.insert(name, *ptr);

  toml::table numerics{{"cutoff_tolerance", c.numerics.cutoff_tolerance},
                       {"kmax", static_cast<long long>(c.numerics.kmax)},
                       {"spectrum_count", static_cast<long long>(c.numerics.spectrum_count)},
                       {"gap_floor", c.numerics.gap_floor},
                       {"leakage_tolerance", c.numerics.leakage_tolerance},
                       {"rtol", c.numerics.rtol},
                       {"atol", c.numerics.atol},
                       {"workers", static_cast<long long>(c.numerics.workers)}};
  if (c.numerics.cutoff) {
    numerics.insert("cutoff", static_cast<long long>(*c.numerics.cutoff));
  } else {
    numerics.insert("cutoff", "auto");
  }

  toml::table root{{"task", to_string(c.task)}, {"model", model}, {"numerics", numerics}};
  if (!c.sweep.grid.empty() || !c.sweep.parameter.empty()) {
    toml::table sweep{{"parameter", c.sweep.parameter}, {"grid", array(c.sweep.grid)},
                      {"N", array(c.sweep.n_values)}, {"rates", array(c.sweep.rates)}};
    root.insert("sweep", sweep);
  }
  toml::table evolve{{"t_final", c.evolve.t_final},
                     {"records", static_cast<long long>(c.evolve.records)},
                     {"initial", c.evolve.initial},
                     {"alpha", array({c.evolve.alpha.real(), c.evolve.alpha.imag()})},
                     {"method", c.evolve.method}};
  root.insert("evolve", evolve);
  toml::table wigner{{"state", c.wigner.state},
                     {"times", array(c.wigner.times)},
                     {"points", static_cast<long long>(c.wigner.points)}};
  if (c.wigner.extent) wigner.insert("extent", *c.wigner.extent);
  root.insert("wigner", wigner);
  root.insert("sectors_check", toml::table{{"removal", c.sectors_check.removal},
                                           {"rate", c.sectors_check.rate},
                                           {"phi", c.sectors_check.phi}});
  root.insert("output", toml::table{{"dir", c.output.dir.string()}, {"timestamp", c.output.timestamp}});
  std::ostringstream os;
  os << root << "\n";
  return os.str();
}

}  // namespace dptlab::cli
