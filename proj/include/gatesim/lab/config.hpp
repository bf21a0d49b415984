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

#pragma once

#include <gatesim/gate.hpp>
#include <gatesim/lab/units.hpp>
#include <gatesim/tensor.hpp>

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gatesim::lab {

/// Malformed or inconsistent configuration. Maps to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ScenarioId { fig2, fig3a, fig3b, fig4, fig5a, fig5b, fig5c, fig5d, fig6, fig7, fig8, custom };

ScenarioId parse_scenario(std::string_view name);
std::string scenario_name(ScenarioId id);
const std::vector<ScenarioId>& all_scenarios();

enum class UnitsMode { natural, physical };

struct DesignInputs {
  std::string variant = "unshaped";  // "unshaped" or "shaped"
  int k1 = 1;
  int k2 = 0;
  int k3 = 0;
  int order = 1;  // shaped only
  double phi = std::numbers::pi;
  double r_p = 2.5;
  double g_m = 1.0;

  GateDesign solve() const;
};

/// A swept parameter over [start, stop] with `count` uniform points. For
/// tau, delta, omega and g_m the values are relative errors; for kappa and
/// gamma they are rates in units of g.
struct SweepSpec {
  std::string parameter;
  double start = -0.1;
  double stop = 0.1;
  int count = 41;

  std::vector<double> grid() const;
};

/// Parses "a:b:n". Throws ConfigError.
SweepSpec parse_range(std::string_view parameter, std::string_view range);

struct SurfaceGrid {
  double rel_span = 0.03;  // +- fraction around the nominal t and delta
  int t_points = 13;
  int delta_points = 13;
  double kappa_mhz = 0.5;
  double gamma_mhz = 0.5;
};

struct ValiditySpec {
  std::vector<double> r_p = {1.0, 1.5, 2.0, 2.5};
  double periods = 5.0;  // in gate periods 2 pi / (g e^{2.5})
};

struct ScenarioConfig {
  ScenarioId scenario = ScenarioId::fig2;
  DesignInputs design;
  std::optional<SweepSpec> sweep;
  double kappa = 0.0;
  double gamma = 0.0;
  UnitsMode units = UnitsMode::natural;
  UnitContext unit_context;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;  // reserved, every scenario is deterministic
  Index n_fock = 15;
  int samples = 201;
  int steps_per_period = 0;  // 0 picks the per-scenario default
  std::size_t workers = 0;   // 0 uses the hardware concurrency
  std::string trajectory_branch = "++";  // "++" or "psi0"
  SurfaceGrid surface;
  ValiditySpec validity;

  /// Range and consistency checks. Throws ConfigError.
  void validate() const;
};

/// Defaults for a scenario, before any overrides.
ScenarioConfig default_config(ScenarioId id);

/// Strict JSON: unknown keys, wrong types and bad values throw ConfigError.
ScenarioConfig parse_config(std::string_view json_text);
ScenarioConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ScenarioConfig& cfg);

}  // namespace gatesim::lab
