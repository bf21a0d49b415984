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

#include <gatesim/model.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gatesim {

double PulseShape::amplitude(double g_m, double t) const {
  if (kind == PulseKind::constant) return g_m;
  const double s = std::sin(alpha * t);
  return g_m * s * s;
}

void SystemParams::validate() const {
  if (!(g_m > 0.0)) throw std::invalid_argument("SystemParams: g_m must be > 0");
  if (!(r_p >= 0.0)) throw std::invalid_argument("SystemParams: r_p must be >= 0");
  if (!(kappa >= 0.0) || !(gamma >= 0.0)) {
    throw std::invalid_argument("SystemParams: decay rates must be >= 0");
  }
  if (n_fock < 2) throw std::invalid_argument("SystemParams: n_fock must be >= 2");
  if (!std::isfinite(delta) || !std::isfinite(omega) || !std::isfinite(delta_q)) {
    throw std::invalid_argument("SystemParams: non-finite detuning or drive");
  }
  if (pulse.kind == PulseKind::sine_squared && !(pulse.alpha > 0.0)) {
    throw std::invalid_argument("SystemParams: sine-squared pulse needs alpha > 0");
  }
}

void LabFrameParams::validate() const {
  const double dc = cavity_detuning();
  if (!(std::abs(pump_amplitude) < std::abs(dc))) {
    throw std::invalid_argument("LabFrameParams: |Omega_p| = " + std::to_string(std::abs(pump_amplitude)) +
                                " must be below |Delta_c| = " + std::to_string(std::abs(dc)) +
                                " (artanh domain)");
  }
  const double scale = std::max({std::abs(omega_p), std::abs(omega_drive), 1.0});
  if (std::abs(omega_drive - omega_p / 2.0) > 1e-12 * scale) {
    throw std::invalid_argument("LabFrameParams: drive frequency must equal omega_p / 2");
  }
}

double LabFrameParams::squeeze_parameter() const {
  validate();
  return 0.5 * std::atanh(pump_amplitude / cavity_detuning());
}

double LabFrameParams::squeezed_detuning() const {
  return cavity_detuning() / std::cosh(2.0 * squeeze_parameter());
}

Hamiltonian& Hamiltonian::add(std::string label, Operator op,
                              std::function<Complex(double)> coefficient) {
  if (!(op.layout() == layout_)) throw std::invalid_argument("Hamiltonian::add: layout mismatch");
  terms_.push_back({std::move(label), std::move(op), std::move(coefficient)});
  return *this;
}

Hamiltonian& Hamiltonian::add_constant(std::string label, Operator op, Complex value) {
  return add(std::move(label), std::move(op), [value](double) { return value; });
}

Operator Hamiltonian::at(double t) const {
  Operator h = Operator::zero(layout_);
  for (const auto& term : terms_) h += term.coefficient(t) * term.op;
  return h;
}

Hamiltonian Hamiltonian::without(const std::vector<std::string>& labels) const {
  Hamiltonian out(layout_);
  for (const auto& term : terms_) {
    if (std::find(labels.begin(), labels.end(), term.label) == labels.end()) out.terms_.push_back(term);
  }
  return out;
}

namespace {

Operator on_qutrit(const SpaceLayout& layout, std::size_t which, const Operator& local) {
  return embed(layout, which, local);
}

}  // namespace

SystemOperators::SystemOperators(Index n_fock)
    : layout(qutrit_pair_layout(n_fock)),
      a(embed(layout, kCavity, annihilator(n_fock))),
      number(a.adjoint() * a),
      sx(Operator::zero(layout)),
      x_sum(Operator::zero(layout)),
      y_sum(Operator::zero(layout)),
      excited_sum(Operator::zero(layout)) {
  const Operator eg = transition(3, kExcited, kGround);
  const Operator ge = transition(3, kGround, kExcited);
  const Operator ee = transition(3, kExcited, kExcited);
  for (std::size_t j : {kQutrit1, kQutrit2}) {
    x_sum += on_qutrit(layout, j, eg + ge);
    y_sum += on_qutrit(layout, j, eg - ge);
    excited_sum += on_qutrit(layout, j, ee);
  }
  sx = Complex(0.5) * x_sum;
}

Operator build_h_lab(const LabFrameParams& p, const SpaceLayout& layout) {
  p.validate();
  if (layout.factors() != 3 || layout.factor(0) != 3 || layout.factor(1) != 3) {
    throw std::invalid_argument("build_h_lab: layout must be {3, 3, n_fock}");
  }
  const SystemOperators ops(layout.factor(kCavity));
  const Operator ad = ops.a.adjoint();
  Operator h = Complex(p.cavity_detuning()) * ops.number;
  h += Complex(p.qutrit_detuning()) * ops.excited_sum;
  const Operator eg = transition(3, kExcited, kGround);
  const Operator ge = transition(3, kGround, kExcited);
  for (std::size_t j : {kQutrit1, kQutrit2}) {
    const Operator up = on_qutrit(layout, j, eg);
    const Operator down = on_qutrit(layout, j, ge);
    h += Complex(p.g) * (up * ops.a + ad * down);
  }
  h += Complex(-p.drive_amplitude / 2.0) * ops.x_sum;
  h += Complex(-p.pump_amplitude / 2.0) * (ops.a * ops.a + ad * ad);
  return h;
}

Hamiltonian squeezed_frame_hamiltonian(const SystemParams& p) {
  p.validate();
  const SystemOperators ops(p.n_fock);
  const Operator ad = ops.a.adjoint();
  Hamiltonian h(ops.layout);
  h.add_constant(kTermCavity, ops.number, p.delta);
  if (p.delta_q != 0.0) h.add_constant(kTermQutrit, ops.excited_sum, p.delta_q);

  const double up = 0.5 * std::exp(p.r_p);
  const double down = -0.5 * std::exp(-p.r_p);
  const SystemParams params = p;
  h.add(kTermRabi, (ops.a + ad) * ops.x_sum,
        [params, up](double t) { return Complex(up * params.coupling(t)); });
  // (a^dagger - a) and y_sum are both anti-Hermitian and commute, so the
  // product is Hermitian.
  h.add(kTermError, (ad - ops.a) * ops.y_sum,
        [params, down](double t) { return Complex(down * params.coupling(t)); });
  h.add_constant(kTermDrive, ops.x_sum, -p.omega / 2.0);
  return h;
}

Operator build_h_s(const SystemParams& p, double t) { return squeezed_frame_hamiltonian(p).at(t); }

Operator build_h_err(const SystemParams& p, double t) {
  const Hamiltonian full = squeezed_frame_hamiltonian(p);
  Operator out = Operator::zero(full.layout());
  for (const auto& term : full.terms()) {
    if (term.label == kTermError) out += term.coefficient(t) * term.op;
  }
  return out;
}

Hamiltonian rabi_hamiltonian(const SystemParams& p, Picture picture) {
  if (picture == Picture::schrodinger) return squeezed_frame_hamiltonian(p).without({kTermError});

  p.validate();
  const SystemOperators ops(p.n_fock);
  Hamiltonian h(ops.layout);
  const double enhance = std::exp(p.r_p);
  const SystemParams params = p;
  h.add(kTermRabi, ops.sx * ops.a, [params, enhance](double t) {
    return enhance * params.coupling(t) * std::exp(Complex(0.0, -params.delta * t));
  });
  h.add(std::string(kTermRabi) + "_dag", ops.sx * ops.a.adjoint(), [params, enhance](double t) {
    return enhance * params.coupling(t) * std::exp(Complex(0.0, params.delta * t));
  });
  h.add_constant(kTermDrive, ops.sx, -p.omega);
  return h;
}

Operator build_h_rabi(const SystemParams& p, double t, bool interaction_picture) {
  return rabi_hamiltonian(p, interaction_picture ? Picture::interaction : Picture::schrodinger).at(t);
}

LindbladSpec build_lindblad(const SystemParams& p, const SpaceLayout& layout) {
  if (!(p.kappa >= 0.0) || !(p.gamma >= 0.0)) {
    throw std::invalid_argument("build_lindblad: decay rates must be >= 0");
  }
  if (layout.factors() != 3 || layout.factor(0) != 3 || layout.factor(1) != 3) {
    throw std::invalid_argument("build_lindblad: layout must be {3, 3, n_fock}");
  }
  const Complex sg(std::sqrt(p.gamma));
  const Complex sk(std::sqrt(p.kappa));
  const Operator g_from_e = transition(3, kGround, kExcited);
  const Operator f_from_e = transition(3, kAuxiliary, kExcited);
  return LindbladSpec{
      sg * on_qutrit(layout, kQutrit1, g_from_e),
      sg * on_qutrit(layout, kQutrit1, f_from_e),
      sg * on_qutrit(layout, kQutrit2, g_from_e),
      sg * on_qutrit(layout, kQutrit2, f_from_e),
      sk * embed(layout, kCavity, annihilator(layout.factor(kCavity))),
  };
}

}  // namespace gatesim
