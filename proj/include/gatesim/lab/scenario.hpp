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

#include <gatesim/evolve.hpp>
#include <gatesim/gate.hpp>
#include <gatesim/lab/config.hpp>
#include <gatesim/lab/csv.hpp>
#include <gatesim/model.hpp>

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gatesim::lab {

/// Control errors, relative: x' = x (1 + rel).
enum class ErrorKind { tau, delta, omega, g_m };

ErrorKind parse_error_kind(std::string_view name);

struct PerturbedRun {
  SystemParams params;     // what the dynamics actually see
  double t_measure = 0.0;  // when the fidelity is read
};

/// Tau errors move only the measurement time. Parameter errors change the
/// dynamics while the target and the nominal tau stay fixed.
PerturbedRun apply_error(const GateDesign& design, ErrorKind which, double rel, Index n_fock = 15,
                         double kappa = 0.0, double gamma = 0.0);

struct GateRun {
  double fidelity = 0.0;
  Diagnostics diagnostics;
};

/// F at t from initial_state, Schroedinger when both rates vanish, Lindblad otherwise.
GateRun simulate_gate(const GateDesign& design, const SystemParams& params, double t, int steps_per_period);

/// The comparison set shared by the photon-number, robustness and decay
/// scenarios: unshaped (1, 0, 0) at r_p = 2.5 and shaped k = 1, 4, 19 at
/// r_p = 3.28, 3.78, 4.49.
std::vector<GateDesign> comparison_designs();
/// "unshaped", "k1", "k4", ...
std::string design_tag(const GateDesign& design);

/// Amplitude setting of one fidelity surface.
struct SurfaceSetting {
  std::string tag;
  double g_m_mhz = 50.0;
  double omega_mhz = 0.0;
};
std::array<SurfaceSetting, 2> surface_settings();

/// Fidelity of the nominal shaped design run at (t, delta) with a surface's
/// amplitudes and the configured physical decay rates.
GateRun surface_point(const GateDesign& nominal, const SurfaceSetting& setting, double t_ns, double delta_mhz,
                      const ScenarioConfig& cfg);

struct ScenarioOutput {
  std::string name;
  CsvTable table;
  std::string manifest;  // JSON text
  std::vector<GateDesign> designs;
  Diagnostics diagnostics;
};

/// Dispatches on cfg.scenario. Throws ConfigError for an unsolvable design.
ScenarioOutput run_scenario(const ScenarioConfig& cfg);
ScenarioOutput run_fig7_surface(const ScenarioConfig& cfg);
/// cfg.design swept along cfg.sweep. Output name "sweep_<parameter>".
ScenarioOutput run_sweep(const ScenarioConfig& cfg);
/// Step refinement (three levels, factor 2) and Fock cutoff (n_fock against
/// 2 n_fock) for the scenario's leading design.
ScenarioOutput run_convergence(const ScenarioConfig& cfg);

/// GATESIM_OUT, when set and non-empty, overrides the configured directory.
std::filesystem::path resolve_output_dir(const ScenarioConfig& cfg);
/// Writes <name>.csv and <name>.manifest.json, creating the directory.
void write_outputs(const ScenarioOutput& out, const std::filesystem::path& dir);

/// Rebuilds the designs recorded in a manifest and re-validates each.
std::vector<GateDesign> load_manifest_designs(const std::filesystem::path& manifest);

}  // namespace gatesim::lab
