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

// Two qutrits coupled to one parametrically driven cavity mode.
//
// Space layout is {qutrit 1, qutrit 2, cavity} with qutrit levels ordered
// (e, g, f). Units are natural: hbar = 1 and the peak coupling g_m sets the
// frequency scale, so g_m = 1 unless a control error is being modelled.

#include <gatesim/tensor.hpp>

#include <functional>
#include <string>
#include <vector>

namespace gatesim {

enum Level : Index { kExcited = 0, kGround = 1, kAuxiliary = 2 };

inline constexpr std::size_t kQutrit1 = 0;
inline constexpr std::size_t kQutrit2 = 1;
inline constexpr std::size_t kCavity = 2;

inline SpaceLayout qutrit_pair_layout(Index n_fock) { return SpaceLayout({3, 3, n_fock}); }

enum class PulseKind { constant, sine_squared };

/// Coupling envelope g(t): constant g_m, or g_m sin^2(alpha t).
struct PulseShape {
  PulseKind kind = PulseKind::constant;
  double alpha = 0.0;

  static PulseShape constant() { return {}; }
  static PulseShape sine_squared(double alpha) { return {PulseKind::sine_squared, alpha}; }

  double amplitude(double g_m, double t) const;
};

struct SystemParams {
  double g_m = 1.0;      // peak bare coupling
  double r_p = 0.0;      // squeeze parameter
  double delta = 0.0;    // squeezed-frame cavity detuning
  double omega = 0.0;    // classical drive amplitude on e<->g
  double delta_q = 0.0;  // qutrit detuning, zero outside the frame checks
  double kappa = 0.0;    // cavity decay rate
  double gamma = 0.0;    // e -> g and e -> f relaxation rate, each
  Index n_fock = 15;
  PulseShape pulse;

  void validate() const;
  SpaceLayout layout() const { return qutrit_pair_layout(n_fock); }
  /// Instantaneous bare coupling g(t).
  double coupling(double t) const { return pulse.amplitude(g_m, t); }
};

/// Laboratory-side description of the same device, in angular frequencies.
struct LabFrameParams {
  double omega_a = 0.0;          // cavity frequency
  double omega_p = 0.0;          // parametric pump frequency
  double omega_drive = 0.0;      // classical drive frequency, must equal omega_p / 2
  double omega_e = 0.0;          // level energies
  double omega_g = 0.0;
  double pump_amplitude = 0.0;   // Omega_p
  double drive_amplitude = 0.0;  // Omega
  double g = 0.0;                // bare coupling

  double cavity_detuning() const { return omega_a - omega_p / 2.0; }
  double qutrit_detuning() const { return omega_e - omega_g - omega_p / 2.0; }
  /// r_p = artanh(Omega_p / Delta_c) / 2. Throws outside |Omega_p| < |Delta_c|.
  double squeeze_parameter() const;
  /// Delta_c sech(2 r_p), the cavity frequency after the Bogoliubov rotation.
  double squeezed_detuning() const;
  void validate() const;
};

/// Collapse operators: e -> g and e -> f on each qutrit at rate gamma, and
/// cavity photon loss at rate kappa.
struct LindbladSpec {
  Operator L_g1;
  Operator L_f1;
  Operator L_g2;
  Operator L_f2;
  Operator L_a;

  std::vector<Operator> operators() const { return {L_g1, L_f1, L_g2, L_f2, L_a}; }
};

/// Sum of fixed operators with scalar time-dependent coefficients. Kept in
/// this factored form so the evolver can precompute sparse views once.
class Hamiltonian {
 public:
  struct Term {
    std::string label;
    Operator op;
    std::function<Complex(double)> coefficient;
  };

  explicit Hamiltonian(SpaceLayout layout) : layout_(std::move(layout)) {}

  Hamiltonian& add(std::string label, Operator op, std::function<Complex(double)> coefficient);
  Hamiltonian& add_constant(std::string label, Operator op, Complex value);

  const SpaceLayout& layout() const { return layout_; }
  const std::vector<Term>& terms() const { return terms_; }
  Operator at(double t) const;
  /// Terms whose label is not in `labels`.
  Hamiltonian without(const std::vector<std::string>& labels) const;

 private:
  SpaceLayout layout_;
  std::vector<Term> terms_;
};

// Term labels used by the builders below.
inline constexpr const char* kTermCavity = "cavity";
inline constexpr const char* kTermQutrit = "qutrit";
inline constexpr const char* kTermRabi = "rabi";
inline constexpr const char* kTermError = "error";
inline constexpr const char* kTermDrive = "drive";

/// Named operators on the full {3, 3, n_fock} space.
struct SystemOperators {
  explicit SystemOperators(Index n_fock);

  SpaceLayout layout;
  Operator a;
  Operator number;
  Operator sx;           // S_x = sum_j (|e><g| + |g><e|)_j / 2
  Operator x_sum;        // sum_j (|e><g| + |g><e|)_j
  Operator y_sum;        // sum_j (|e><g| - |g><e|)_j, anti-Hermitian
  Operator excited_sum;  // sum_j |e><e|_j
};

/// Eq. (1)-style Hamiltonian in the frame rotating at omega_p / 2.
Operator build_h_lab(const LabFrameParams& p, const SpaceLayout& layout);

/// Squeezed-frame Hamiltonian including the e^{-r_p} error term.
Hamiltonian squeezed_frame_hamiltonian(const SystemParams& p);
Operator build_h_s(const SystemParams& p, double t);
/// The e^{-r_p} correction alone.
Operator build_h_err(const SystemParams& p, double t);

enum class Picture { schrodinger, interaction };

/// Ideal Rabi model. In the Schroedinger picture this is the squeezed-frame
/// Hamiltonian without the error term; in the interaction picture with
/// respect to delta a^dagger a it is g_s S_x (a e^{-i delta t} + h.c.) - omega S_x.
Hamiltonian rabi_hamiltonian(const SystemParams& p, Picture picture);
Operator build_h_rabi(const SystemParams& p, double t, bool interaction_picture);

LindbladSpec build_lindblad(const SystemParams& p, const SpaceLayout& layout);

}  // namespace gatesim
