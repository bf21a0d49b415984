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
#include <gatesim/model.hpp>
#include <gatesim/tensor.hpp>

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace gatesim {

/// Logical qubit inside each qutrit: |0_L> = |f>, |1_L> = (|e> + |g>) / sqrt 2.
struct LogicalBasis {
  static constexpr Index kDim = 4;

  /// 3 x 2 isometry with columns |0_L>, |1_L>.
  static Matrix qutrit_isometry();
  /// (|e> - |g>) / sqrt 2, the leakage direction.
  static Vector leakage_ket();
  /// 9 x 4 isometry for the pair, columns {ff, f+, +f, ++}.
  static Matrix isometry();
  /// Logical ket of a branch s in {0: ff, 1: f+, 2: +f, 3: ++} on layout {3, 3}.
  static StateVector branch(int s);
};

inline constexpr std::array<const char*, 4> kBranchNames = {"ff", "f+", "+f", "++"};

/// (|ff> + |f+> + |+f> + |++>) / 2 on the qutrits, cavity in vacuum.
StateVector initial_state(Index n_fock);
/// A single branch with the cavity in vacuum.
StateVector branch_initial_state(int s, Index n_fock);
/// Logical gate applied to the logical initial state, embedded on layout {3, 3}.
StateVector target_state(const GateDesign& design);

// Observable names attached by standard_observables.
inline constexpr const char* kObsPhotonNumber = "photon_number";
inline constexpr const char* kObsField = "field";

/// <a^dagger a> and <a> on layout {3, 3, n_fock}.
std::vector<Observable> standard_observables(Index n_fock);

/// <psi_tau| rho_q(t) |psi_tau> at every snapshot. Rejects a result that did
/// not start from initial_state(n_fock).
std::vector<double> state_fidelity(const EvolutionResult& result, const GateDesign& design);

/// Logical-subspace channel: maps a 4 x 4 logical operator to the projected
/// output V^dagger Tr_cav[evolve(V u V^dagger x |0><0|)] V at each sample time.
struct ChannelOutput {
  std::vector<Matrix> outputs;
  Diagnostics diagnostics;
};
using LogicalChannel = std::function<ChannelOutput(const Matrix& logical_input)>;

/// Evolves the four logical kets once and builds any output by linearity.
LogicalChannel unitary_channel(const Hamiltonian& h, const std::vector<double>& sample_times,
                               const StepControl& step, std::size_t workers = 0);
/// One Lindblad evolution per input operator.
LogicalChannel lindblad_channel(const Hamiltonian& h, std::optional<LindbladSpec> lindblad,
                                const std::vector<double>& sample_times, const StepControl& step);
/// u -> U u U^dagger at a single time.
LogicalChannel conjugation_channel(const Matrix& unitary);
/// u -> tr(u) I / 4 at a single time.
LogicalChannel depolarizing_channel();

/// The 16 two-qubit Pauli products, index 4 a + b for sigma_a x sigma_b with
/// sigma_0 = I, sigma_1 = X, sigma_2 = Y, sigma_3 = Z.
std::array<Matrix, 16> logical_paulis();

struct AverageFidelity {
  std::vector<double> values;  // one per channel sample time
  Diagnostics diagnostics;
};

/// [sum_l tr(U u_l^dagger U^dagger eps(u_l)) + d^2] / [d^2 (d + 1)] with d = 4.
/// The 16 channel evaluations run on at most `workers` threads.
AverageFidelity average_fidelity(const LogicalChannel& channel, const Matrix& target_unitary,
                                 std::size_t workers = 0);
AverageFidelity average_fidelity(const LogicalChannel& channel, const GateDesign& design,
                                 std::size_t workers = 0);

struct PopulationPhaseReport {
  std::vector<double> times;
  /// <s| rho_q |s> per branch s.
  std::array<std::vector<double>, 4> populations;
  /// arg <s 0|psi> - arg <ff 0|psi>, unwrapped in time.
  std::array<std::vector<double>, 4> phases;
};

/// Pure-state runs from initial_state only.
PopulationPhaseReport populations_and_phases(const EvolutionResult& result);

/// <a^dagger a>(t), from the photon_number series when present, else from snapshots.
std::vector<double> photon_number(const EvolutionResult& result);

struct PhasePoint {
  double x = 0.0;  // Re <a>
  double p = 0.0;  // Im <a>
};
std::vector<PhasePoint> phase_space_trajectory(const EvolutionResult& result);

struct ValidityReport {
  std::vector<double> times;
  std::vector<double> fidelity;
  Diagnostics diagnostics;
};

/// |<psi_rabi(t)|psi_exact(t)>|^2 from two Schroedinger runs starting at
/// initial_state. With include_error = false both runs drop the error term.
ValidityReport rabi_validity_fidelity(const SystemParams& p, double t_final, std::size_t samples,
                                      const StepControl& step, bool include_error = true);

/// Nearest-branch continuation of a sequence of angles.
std::vector<double> unwrap_phases(const std::vector<double>& raw);

}  // namespace gatesim
