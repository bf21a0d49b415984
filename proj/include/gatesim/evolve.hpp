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

#include <gatesim/model.hpp>
#include <gatesim/tensor.hpp>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace gatesim {

/// Fixed steps per fastest period, min(2 pi / |delta|, pi / alpha). Lindblad
/// runs use the coarser default; pure-state runs are cheap enough to hold the
/// fidelity self-convergence below 1e-8.
inline constexpr int kStepsPerPeriod = 200;
inline constexpr int kPureStepsPerPeriod = 800;

/// Largest RK4 step for a parameter set.
double recommended_step(const SystemParams& p, int steps_per_period = kStepsPerPeriod);

struct StepControl {
  double dt_max = 0.0;
  bool adaptive = false;
  double tolerance = 1e-10;  // adaptive mode only: max-abs local error per step
};

struct Observable {
  std::string name;
  Operator op;
};

enum class SnapshotMode { full, reduced, none };

struct EvolutionRequest {
  Hamiltonian hamiltonian;
  std::variant<StateVector, DensityMatrix> initial;
  std::optional<LindbladSpec> lindblad;
  double t_final = 0.0;
  std::vector<double> sample_times;
  std::vector<Observable> observables;
  StepControl step;
  SnapshotMode snapshots = SnapshotMode::full;
  std::vector<std::size_t> reduce_to = {kQutrit1, kQutrit2};  // SnapshotMode::reduced
  std::optional<std::size_t> fock_factor;  // factor whose top two levels are monitored
};

// Diagnostic limits; exceeding any of them flags the result.
inline constexpr double kNormDriftLimit = 1e-6;
inline constexpr double kTraceDriftLimit = 1e-7;
inline constexpr double kHermiticityLimit = 1e-9;
inline constexpr double kPositivityLimit = -1e-5;
inline constexpr double kTopFockLimit = 1e-8;

struct Diagnostics {
  double norm_drift = 0.0;
  double trace_drift = 0.0;
  double hermiticity_drift = 0.0;
  double min_eigenvalue = 0.0;
  double top_fock_population = 0.0;
  std::size_t steps = 0;
  bool flagged = false;
  std::vector<std::string> reasons;

  void flag(std::string reason);
  void merge(const Diagnostics& other);
};

struct EvolutionResult {
  explicit EvolutionResult(std::variant<StateVector, DensityMatrix> init) : initial(std::move(init)) {}

  std::vector<double> times;
  std::vector<StateVector> states;       // Schroedinger runs
  std::vector<DensityMatrix> densities;  // Lindblad runs, full or reduced
  std::map<std::string, std::vector<Complex>> series;
  Diagnostics diagnostics;
  std::variant<StateVector, DensityMatrix> initial;

  bool pure() const { return std::holds_alternative<StateVector>(initial); }
};

EvolutionResult evolve_schrodinger(const EvolutionRequest& req);
EvolutionResult evolve_lindblad(const EvolutionRequest& req);
/// Dispatches on the presence of `lindblad` and the type of `initial`.
EvolutionResult evolve(const EvolutionRequest& req);

/// Scalar summary compared between runs at successive step refinements.
using ConvergenceScore = std::function<std::vector<double>(const EvolutionResult&)>;

struct ConvergenceReport {
  std::vector<double> dts;
  /// deviations[i] = max |score(dts[i]) - score(dts[i + 1])|
  std::vector<double> deviations;
  /// deviations[0] / deviations[1] when three or more levels were run.
  std::optional<double> ratio;
};

/// Reruns `req` at dt, dt / refinement, ... (`levels` runs in total). Without a
/// score, compares every observable series and the final snapshot.
ConvergenceReport step_convergence_probe(const EvolutionRequest& req, int refinement,
                                         ConvergenceScore score = {}, int levels = 2);

}  // namespace gatesim
