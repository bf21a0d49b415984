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

// gatesim command line: solve, run, sweep, convergence.
//
// Exit status: 0 success, 1 runtime failure, 2 configuration error,
// 3 outputs written but a diagnostic limit was exceeded.

#include <gatesim/lab/scenario.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace gatesim;
using namespace gatesim::lab;

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitFlagged = 3;

// Options shared by every verb. Explicit flags override the config file.
struct CommonOptions {
  std::string config_path;
  std::string units;
  std::optional<long> fock;
  std::optional<int> steps;
  std::optional<std::size_t> workers;
  std::optional<double> g_mhz;
};

// Design flags used by solve, sweep and custom runs.
struct DesignOptions {
  std::optional<std::string> variant;
  std::optional<int> k1, k2, k3, order;
  std::optional<double> phi, r_p, kappa, gamma;
};

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("--config", o.config_path, "JSON scenario config")->check(CLI::ExistingFile);
  app->add_option("--units", o.units, "natural or physical")->check(CLI::IsMember({"natural", "physical"}));
  app->add_option("--fock", o.fock, "Fock cutoff")->check(CLI::Range(2L, 200L));
  app->add_option("--steps-per-period", o.steps, "RK4 steps per fastest period (0 = default)");
  app->add_option("--workers", o.workers, "worker threads (0 = all cores)");
  app->add_option("--g-mhz", o.g_mhz, "coupling g/2pi in MHz for physical units");
}

void add_design(CLI::App* app, DesignOptions& o) {
  app->add_option("--variant", o.variant, "unshaped or shaped")->check(CLI::IsMember({"unshaped", "shaped"}));
  app->add_option("--k1", o.k1);
  app->add_option("--k2", o.k2);
  app->add_option("--k3", o.k3);
  app->add_option("--order", o.order, "shaped pulse order k");
  app->add_option("--phi", o.phi, "target phase");
  app->add_option("--r-p", o.r_p, "squeezing r_p");
  app->add_option("--kappa", o.kappa, "cavity decay in units of g");
  app->add_option("--gamma", o.gamma, "qutrit decay in units of g");
}

ScenarioConfig base_config(const CommonOptions& o, ScenarioId fallback) {
  ScenarioConfig cfg = o.config_path.empty() ? default_config(fallback) : load_config(o.config_path);
  if (!o.units.empty()) cfg.units = o.units == "physical" ? UnitsMode::physical : UnitsMode::natural;
  if (o.fock) cfg.n_fock = *o.fock;
  if (o.steps) cfg.steps_per_period = *o.steps;
  if (o.workers) cfg.workers = *o.workers;
  if (o.g_mhz) cfg.unit_context.g_mhz = *o.g_mhz;
  return cfg;
}

void apply_design(const DesignOptions& o, ScenarioConfig& cfg) {
  DesignInputs& d = cfg.design;
  if (o.variant) d.variant = *o.variant;
  if (o.k1) d.k1 = *o.k1;
  if (o.k2) d.k2 = *o.k2;
  if (o.k3) d.k3 = *o.k3;
  if (o.order) {
    d.order = *o.order;
    if (!o.variant) d.variant = "shaped";
  }
  if (o.phi) d.phi = *o.phi;
  if (o.r_p) d.r_p = *o.r_p;
  if (o.kappa) cfg.kappa = *o.kappa;
  if (o.gamma) cfg.gamma = *o.gamma;
}

int emit(const ScenarioOutput& out, const ScenarioConfig& cfg, const std::string& out_override) {
  ScenarioConfig target = cfg;
  if (!out_override.empty()) target.output_dir = out_override;
  const auto dir = resolve_output_dir(target);
  write_outputs(out, dir);
  fmt::print("wrote {}/{}.csv ({} rows)\n", dir.string(), out.name, out.table.rows().size());
  for (const auto& d : out.designs) {
    for (const auto& w : physical_warnings(d, cfg.unit_context)) fmt::print(stderr, "warning: {}\n", w);
  }
  if (out.diagnostics.flagged) {
    fmt::print(stderr, "diagnostics flagged ({} reasons), first: {}\n", out.diagnostics.reasons.size(),
               out.diagnostics.reasons.empty() ? "" : out.diagnostics.reasons.front());
    return kExitFlagged;
  }
  return 0;
}

void print_design(const GateDesign& d, const UnitContext& ctx, bool physical) {
  const auto row = [](const char* name, double value, const char* unit) {
    fmt::print("  {:<8} {:>18.10g} {}\n", name, value, unit);
  };
  fmt::print("{}\n", d.label());
  row("r_p", d.r_p, "");
  row("phi", d.phi, "rad");
  if (physical) {
    row("g_m", to_mhz(d.g_m, ctx), "MHz");
    row("delta", to_mhz(d.delta, ctx), "MHz");
    row("omega", to_mhz(d.omega, ctx), "MHz");
    if (d.shaped()) row("alpha", to_mhz(d.alpha, ctx), "MHz");
    row("tau", to_ns(d.tau, ctx), "ns");
  } else {
    row("g_m", d.g_m, "g");
    row("delta", d.delta, "g");
    row("omega", d.omega, "g");
    if (d.shaped()) row("alpha", d.alpha, "g");
    row("tau", d.tau, "1/g");
  }
  for (const auto& w : physical_warnings(d, ctx)) fmt::print("  warning: {}\n", w);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gatesim: squeezed-cavity geometric phase gate simulator"};
  app.require_subcommand(1);

  CommonOptions common;
  DesignOptions design;

  auto* solve = app.add_subcommand("solve", "Solve a gate design and print its parameters");
  add_common(solve, common);
  add_design(solve, design);

  std::string scenario_name_arg;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "Run a scenario and write <scenario>.csv and <scenario>.manifest.json");
  add_common(run, common);
  add_design(run, design);
  run->add_option("--scenario", scenario_name_arg, "fig2 ... fig8 or custom")->required();
  run->add_option("--out", out_dir, "output directory (GATESIM_OUT takes precedence)");

  std::string param;
  std::string range;
  auto* sweep = app.add_subcommand("sweep", "Sweep one parameter of a design");
  add_common(sweep, common);
  add_design(sweep, design);
  sweep->add_option("--param", param, "tau, delta, omega, g_m, kappa or gamma")->required();
  sweep->add_option("--range", range, "start:stop:count")->required();
  sweep->add_option("--out", out_dir, "output directory");

  auto* conv = app.add_subcommand("convergence", "Step and Fock-cutoff convergence for a scenario's design");
  add_common(conv, common);
  add_design(conv, design);
  conv->add_option("--scenario", scenario_name_arg, "scenario id")->required();
  conv->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (solve->parsed()) {
      ScenarioConfig cfg = base_config(common, ScenarioId::custom);
      apply_design(design, cfg);
      print_design(cfg.design.solve(), cfg.unit_context, cfg.units == UnitsMode::physical);
      return 0;
    }
    if (run->parsed()) {
      const ScenarioId id = parse_scenario(scenario_name_arg);
      ScenarioConfig cfg = base_config(common, id);
      if (!common.config_path.empty() && cfg.scenario != id) {
        throw ConfigError("--scenario disagrees with the config file");
      }
      apply_design(design, cfg);
      return emit(run_scenario(cfg), cfg, out_dir);
    }
    if (sweep->parsed()) {
      ScenarioConfig cfg = base_config(common, ScenarioId::custom);
      apply_design(design, cfg);
      cfg.sweep = parse_range(param, range);
      cfg.validate();
      return emit(run_sweep(cfg), cfg, out_dir);
    }
    if (conv->parsed()) {
      const ScenarioId id = parse_scenario(scenario_name_arg);
      ScenarioConfig cfg = base_config(common, id);
      apply_design(design, cfg);
      cfg.validate();
      return emit(run_convergence(cfg), cfg, out_dir);
    }
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitRuntime;
  }
  return kExitRuntime;
}
