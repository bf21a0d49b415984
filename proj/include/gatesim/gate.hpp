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

// Geometric phase gate design.
//
// Under the ideal Rabi model the propagator factorises as
//   U(t) = exp(-i F S_x a) exp(-i G S_x a^dagger) exp(-i A S_x^2) exp(-i B S_x)
// with displacement integrals F, G, a two-qubit phase A and a drive phase B.
// Gates close when F = G = 0; the phase conditions then fix delta and omega.

#include <gatesim/model.hpp>
#include <gatesim/tensor.hpp>

#include <numbers>
#include <string>
#include <variant>
#include <vector>

namespace gatesim {

struct PhaseIntegrals {
  Complex F{};
  Complex G{};
  double A = 0.0;       // real part, the accumulated two-qubit phase
  double A_imag = 0.0;  // imaginary remainder of the complex closed form
  double B = 0.0;
  double t = 0.0;
};

/// Closed forms for a constant coupling g_s. Throws for delta == 0.
PhaseIntegrals integrals_unshaped(double g_s, double delta, double omega, double t);

struct QuadratureResult {
  PhaseIntegrals integrals;
  double error_estimate = 0.0;  // |I(n) - I(n/2)| over F, G and A
  bool converged = false;
};

/// Direct composite Gauss-Legendre evaluation of F, G and the nested A
/// integral for any envelope. Independent of the closed forms.
QuadratureResult quadrature_oracle(const PulseShape& pulse, double g_m, double r_p, double delta,
                                   double omega, double t, int subdivisions = 2000);

struct ShapedIntegrals {
  /// The sin^2 closed forms with their published structure. They drop the
  /// 2 alpha +- delta oscillations and are exact only where e^{2 i alpha t} = 1.
  PhaseIntegrals closed_form;
  /// Full antiderivative of F and G at any t.
  Complex F_exact{};
  Complex G_exact{};
  QuadratureResult quadrature;
};

/// Throws when |delta^2 - 4 alpha^2| is too small, or delta, alpha <= 0.
ShapedIntegrals integrals_shaped(double g_m, double r_p, double delta, double alpha, double omega,
                                 double t);

/// |A'(tau)| at closure (delta = 2 m alpha, alpha tau = pi), reduced algebraically:
/// e^{2 r_p} g_m^2 pi (3 m^2 - 2) / (16 m alpha^2 (m^2 - 1)).
double shaped_phase_magnitude(double g_m, double r_p, double alpha, int m);

struct UnshapedGate {
  int k1 = 1;
  int k2 = 0;
  int k3 = 0;
};

struct ShapedGate {
  int order = 1;
};

struct GateDesign {
  std::variant<UnshapedGate, ShapedGate> variant;
  double phi = std::numbers::pi;
  double delta = 0.0;
  double omega = 0.0;
  double alpha = 0.0;  // shaped only
  double tau = 0.0;
  double r_p = 0.0;
  double g_m = 1.0;
  std::vector<std::string> warnings;

  bool shaped() const { return std::holds_alternative<ShapedGate>(variant); }
  std::string label() const;
  PulseShape pulse() const;
  SystemParams system_params(Index n_fock = 15, double kappa = 0.0, double gamma = 0.0) const;
  /// Ideal-model phases at tau, from the closed form (unshaped) or quadrature (shaped).
  PhaseIntegrals phases_at_gate_time() const;
  /// Re-checks closure, the time constraints and both phase conditions.
  void validate() const;
};

/// Solves A/4 + B/2 = -2 k2 pi and A + B = -(2 k3 pi + phi) with
/// A = -2 k1 pi g_s^2 / delta^2, B = -omega tau, tau = 2 k1 pi / delta,
/// where g_s = g_m e^{r_p}.
GateDesign solve_unshaped(int k1, int k2, int k3, double phi, double r_p, double g_m = 1.0);

/// Order-k sin^2 gate: delta = 2 (k + 1) alpha, alpha tau = pi, and alpha from
/// |A'(tau)| = 2 phi by bisection on the quadrature phase.
GateDesign solve_shaped(int k, double r_p, double g_m = 1.0, double phi = std::numbers::pi);

/// diag(1, 1, 1, e^{i phi}) on the logical basis {ff, f+, +f, ++}, layout {2, 2}.
Operator logical_gate_matrix(const GateDesign& design);

/// A published intermediate value that disagrees with what the constraints give.
struct Discrepancy {
  std::string code;
  std::string message;
  double quoted = 0.0;
  double computed = 0.0;
};

/// Prose phase -(2 k3 + 1 - 4 k2) pi versus the constraint-derived A(tau) for phi = pi.
Discrepancy unshaped_phase_discrepancy(int k1, int k2, int k3);

}  // namespace gatesim
