// Copyright 2026 The gatesim Authors
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

#include <gatesim/lab/config.hpp>

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace gatesim::lab {

namespace {

using nlohmann::json;

const std::vector<std::pair<ScenarioId, const char*>>& scenario_table() {
  static const std::vector<std::pair<ScenarioId, const char*>> table = {
      {ScenarioId::fig2, "fig2"},   {ScenarioId::fig3a, "fig3a"}, {ScenarioId::fig3b, "fig3b"},
      {ScenarioId::fig4, "fig4"},   {ScenarioId::fig5a, "fig5a"}, {ScenarioId::fig5b, "fig5b"},
      {ScenarioId::fig5c, "fig5c"}, {ScenarioId::fig5d, "fig5d"}, {ScenarioId::fig6, "fig6"},
      {ScenarioId::fig7, "fig7"},   {ScenarioId::fig8, "fig8"},   {ScenarioId::custom, "custom"},
  };
  return table;
}

const std::set<std::string>& sweep_parameters() {
  static const std::set<std::string> names = {"tau", "delta", "omega", "g_m", "kappa", "gamma", "rate"};
  return names;
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw ConfigError("");
      out = v.get<double>();
      if (!std::isfinite(out)) throw ConfigError("");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer() && !v.is_number_unsigned()) throw ConfigError("");
      out = v.get<T>();
    } else {
      if (!v.is_string()) throw ConfigError("");
      out = v.get<T>();
    }
  } catch (const std::exception&) {
    throw ConfigError(where + ": bad value for '" + key + "'");
  }
}

DesignInputs parse_design(const json& j) {
  reject_unknown(j, {"variant", "k1", "k2", "k3", "order", "phi", "r_p", "g_m"}, "design");
  DesignInputs d;
  read(j, "variant", d.variant, "design");
  read(j, "k1", d.k1, "design");
  read(j, "k2", d.k2, "design");
  read(j, "k3", d.k3, "design");
  read(j, "order", d.order, "design");
  read(j, "phi", d.phi, "design");
  read(j, "r_p", d.r_p, "design");
  read(j, "g_m", d.g_m, "design");
  return d;
}

SweepSpec parse_sweep(const json& j) {
  reject_unknown(j, {"parameter", "start", "stop", "count"}, "sweep");
  SweepSpec s;
  read(j, "parameter", s.parameter, "sweep");
  read(j, "start", s.start, "sweep");
  read(j, "stop", s.stop, "sweep");
  read(j, "count", s.count, "sweep");
  return s;
}

}  // namespace

ScenarioId parse_scenario(std::string_view name) {
  for (const auto& [id, n] : scenario_table()) {
    if (name == n) return id;
  }
  throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

std::string scenario_name(ScenarioId id) {
  for (const auto& [i, n] : scenario_table()) {
    if (i == id) return n;
  }
  return "?";
}

const std::vector<ScenarioId>& all_scenarios() {
  static const std::vector<ScenarioId> ids = [] {
    std::vector<ScenarioId> out;
    for (const auto& [id, n] : scenario_table()) out.push_back(id);
    return out;
  }();
  return ids;
}

GateDesign DesignInputs::solve() const {
  try {
    if (variant == "unshaped") return solve_unshaped(k1, k2, k3, phi, r_p, g_m);
    if (variant == "shaped") return solve_shaped(order, r_p, g_m, phi);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("design: ") + e.what());
  }
  throw ConfigError("design: variant must be 'unshaped' or 'shaped', got '" + variant + "'");
}

std::vector<double> SweepSpec::grid() const {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] = i == count - 1 ? stop : start + (stop - start) * i / (count - 1);
  }
  return out;
}

SweepSpec parse_range(std::string_view parameter, std::string_view range) {
  SweepSpec s;
  s.parameter = std::string(parameter);
  const auto c1 = range.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : range.find(':', c1 + 1);
  if (c2 == std::string_view::npos || range.find(':', c2 + 1) != std::string_view::npos) {
    throw ConfigError("range must look like a:b:n, got '" + std::string(range) + "'");
  }
  auto number = [&](std::string_view text, auto& out) {
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw ConfigError("range: cannot parse '" + std::string(text) + "'");
    }
  };
  number(range.substr(0, c1), s.start);
  number(range.substr(c1 + 1, c2 - c1 - 1), s.stop);
  number(range.substr(c2 + 1), s.count);
  if (!std::isfinite(s.start) || !std::isfinite(s.stop)) throw ConfigError("range: bounds must be finite");
  if (s.count < 2) throw ConfigError("range: need at least 2 points");
  return s;
}

void ScenarioConfig::validate() const {
  if (design.variant != "unshaped" && design.variant != "shaped") {
    throw ConfigError("design: variant must be 'unshaped' or 'shaped'");
  }
  if (!(design.r_p >= 0.0)) throw ConfigError("design: r_p must be >= 0");
  if (!(design.g_m > 0.0)) throw ConfigError("design: g_m must be > 0");
  if (design.variant == "shaped" && design.order < 1) throw ConfigError("design: order must be >= 1");
  if (design.variant == "unshaped" && design.k1 < 1) throw ConfigError("design: k1 must be >= 1");
  if (sweep) {
    if (!sweep_parameters().count(sweep->parameter)) {
      throw ConfigError("sweep: unknown parameter '" + sweep->parameter + "'");
    }
    if (!std::isfinite(sweep->start) || !std::isfinite(sweep->stop)) throw ConfigError("sweep: range must be finite");
    if (sweep->count < 2) throw ConfigError("sweep: count must be >= 2");
    if ((scenario == ScenarioId::fig6) != (sweep->parameter == "rate")) {
      throw ConfigError("sweep: parameter 'rate' belongs to fig6, which accepts nothing else");
    }
    const bool rate = sweep->parameter == "kappa" || sweep->parameter == "gamma" || sweep->parameter == "rate";
    if (rate && (sweep->start < 0.0 || sweep->stop < 0.0)) throw ConfigError("sweep: rates must be >= 0");
    if (sweep->parameter == "delta" && (std::abs(sweep->start) >= 1.0 || std::abs(sweep->stop) >= 1.0)) {
      throw ConfigError("sweep: relative delta errors must satisfy |rel| < 1");
    }
    if (!rate && (sweep->start <= -1.0 || sweep->stop <= -1.0)) {
      throw ConfigError("sweep: relative errors must exceed -1");
    }
  }
  if (!(kappa >= 0.0) || !(gamma >= 0.0)) throw ConfigError("kappa and gamma must be >= 0");
  if (!(unit_context.g_mhz > 0.0)) throw ConfigError("g_mhz must be > 0");
  if (n_fock < 2) throw ConfigError("n_fock must be >= 2");
  if (samples < 2) throw ConfigError("samples must be >= 2");
  if (steps_per_period < 0) throw ConfigError("steps_per_period must be >= 0");
  if (trajectory_branch != "++" && trajectory_branch != "psi0") {
    throw ConfigError("trajectory_branch must be '++' or 'psi0'");
  }
  if (!(surface.rel_span > 0.0 && surface.rel_span < 0.5)) throw ConfigError("surface: rel_span must be in (0, 0.5)");
  if (surface.t_points < 2 || surface.delta_points < 2) throw ConfigError("surface: need >= 2 points per axis");
  if (!(surface.kappa_mhz >= 0.0) || !(surface.gamma_mhz >= 0.0)) throw ConfigError("surface: rates must be >= 0");
  if (validity.r_p.empty()) throw ConfigError("validity: r_p list is empty");
  for (double r : validity.r_p) {
    if (!(r >= 0.0)) throw ConfigError("validity: r_p must be >= 0");
  }
  if (!(validity.periods > 0.0)) throw ConfigError("validity: periods must be > 0");
}

ScenarioConfig default_config(ScenarioId id) {
  ScenarioConfig cfg;
  cfg.scenario = id;
  switch (id) {
    case ScenarioId::fig5a: cfg.sweep = SweepSpec{"tau", -0.1, 0.1, 41}; break;
    case ScenarioId::fig5b: cfg.sweep = SweepSpec{"delta", -0.1, 0.1, 41}; break;
    case ScenarioId::fig5c: cfg.sweep = SweepSpec{"omega", -0.1, 0.1, 41}; break;
    case ScenarioId::fig5d: cfg.sweep = SweepSpec{"g_m", -0.1, 0.1, 41}; break;
    case ScenarioId::fig6: cfg.sweep = SweepSpec{"rate", 0.0, 0.1, 41}; break;
    case ScenarioId::fig7:
      cfg.design.variant = "shaped";
      cfg.units = UnitsMode::physical;
      break;
    default: break;
  }
  return cfg;
}

ScenarioConfig parse_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(j,
                 {"scenario", "design", "sweep", "kappa", "gamma", "units", "g_mhz", "output_dir", "seed", "n_fock",
                  "samples", "steps_per_period", "workers", "trajectory_branch", "surface", "validity"},
                 "config");
  if (!j.contains("scenario")) throw ConfigError("config: missing 'scenario'");
  std::string scenario;
  read(j, "scenario", scenario, "config");
  ScenarioConfig cfg = default_config(parse_scenario(scenario));

  if (j.contains("design")) cfg.design = parse_design(j.at("design"));
  if (j.contains("sweep")) {
    SweepSpec s = parse_sweep(j.at("sweep"));
    // The scenario default names the parameter when the config leaves it out.
    if (s.parameter.empty() && cfg.sweep) s.parameter = cfg.sweep->parameter;
    cfg.sweep = s;
  }
  read(j, "kappa", cfg.kappa, "config");
  read(j, "gamma", cfg.gamma, "config");
  if (j.contains("units")) {
    std::string units;
    read(j, "units", units, "config");
    if (units == "natural") {
      cfg.units = UnitsMode::natural;
    } else if (units == "physical") {
      cfg.units = UnitsMode::physical;
    } else {
      throw ConfigError("config: units must be 'natural' or 'physical'");
    }
  }
  read(j, "g_mhz", cfg.unit_context.g_mhz, "config");
  if (j.contains("output_dir")) {
    std::string dir;
    read(j, "output_dir", dir, "config");
    cfg.output_dir = dir;
  }
  read(j, "seed", cfg.seed, "config");
  read(j, "n_fock", cfg.n_fock, "config");
  read(j, "samples", cfg.samples, "config");
  read(j, "steps_per_period", cfg.steps_per_period, "config");
  read(j, "workers", cfg.workers, "config");
  read(j, "trajectory_branch", cfg.trajectory_branch, "config");
  if (j.contains("surface")) {
    const json& s = j.at("surface");
    reject_unknown(s, {"rel_span", "t_points", "delta_points", "kappa_mhz", "gamma_mhz"}, "surface");
    read(s, "rel_span", cfg.surface.rel_span, "surface");
    read(s, "t_points", cfg.surface.t_points, "surface");
    read(s, "delta_points", cfg.surface.delta_points, "surface");
    read(s, "kappa_mhz", cfg.surface.kappa_mhz, "surface");
    read(s, "gamma_mhz", cfg.surface.gamma_mhz, "surface");
  }
  if (j.contains("validity")) {
    const json& v = j.at("validity");
    reject_unknown(v, {"r_p", "periods"}, "validity");
    if (v.contains("r_p")) {
      if (!v.at("r_p").is_array()) throw ConfigError("validity: r_p must be an array");
      cfg.validity.r_p.clear();
      for (const auto& r : v.at("r_p")) {
        if (!r.is_number()) throw ConfigError("validity: r_p entries must be numbers");
        cfg.validity.r_p.push_back(r.get<double>());
      }
    }
    read(v, "periods", cfg.validity.periods, "validity");
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string config_to_json(const ScenarioConfig& cfg) {
  json j;
  j["scenario"] = scenario_name(cfg.scenario);
  j["design"] = {{"variant", cfg.design.variant}, {"k1", cfg.design.k1}, {"k2", cfg.design.k2},
                 {"k3", cfg.design.k3},           {"order", cfg.design.order}, {"phi", cfg.design.phi},
                 {"r_p", cfg.design.r_p},         {"g_m", cfg.design.g_m}};
  if (cfg.sweep) {
    j["sweep"] = {{"parameter", cfg.sweep->parameter},
                  {"start", cfg.sweep->start},
                  {"stop", cfg.sweep->stop},
                  {"count", cfg.sweep->count}};
  }
  j["kappa"] = cfg.kappa;
  j["gamma"] = cfg.gamma;
  j["units"] = cfg.units == UnitsMode::natural ? "natural" : "physical";
  j["g_mhz"] = cfg.unit_context.g_mhz;
  j["output_dir"] = cfg.output_dir.string();
  j["seed"] = cfg.seed;
  j["n_fock"] = cfg.n_fock;
  j["samples"] = cfg.samples;
  j["steps_per_period"] = cfg.steps_per_period;
  j["workers"] = cfg.workers;
  j["trajectory_branch"] = cfg.trajectory_branch;
  j["surface"] = {{"rel_span", cfg.surface.rel_span},
                  {"t_points", cfg.surface.t_points},
                  {"delta_points", cfg.surface.delta_points},
                  {"kappa_mhz", cfg.surface.kappa_mhz},
                  {"gamma_mhz", cfg.surface.gamma_mhz}};
  j["validity"] = {{"r_p", cfg.validity.r_p}, {"periods", cfg.validity.periods}};
  return j.dump(2);
}

}  // namespace gatesim::lab
