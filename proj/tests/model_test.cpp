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

#include <doctest.h>

#include <cmath>

using namespace gatesim;

namespace {

SystemParams sample_params() {
  SystemParams p;
  p.r_p = 1.2;
  p.delta = 3.1;
  p.omega = -1.7;
  p.n_fock = 10;
  return p;
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("model") {

TEST_CASE("squeezed-frame Hamiltonian is Hermitian and splits into ideal plus error") {
  SystemParams p = sample_params();
  p.pulse = PulseShape::sine_squared(0.8);
  for (double t : {0.0, 0.37, 1.9}) {
    const Operator h = build_h_s(p, t);
    CHECK(h.hermiticity_error() < 1e-14);
    const Operator ideal = build_h_rabi(p, t, false);
    CHECK(max_abs((h - ideal - build_h_err(p, t)).matrix()) < 1e-14);
  }
}

TEST_CASE("squeezed-frame terms have the expected matrix elements") {
  const SystemParams p = sample_params();
  const Operator h = build_h_s(p, 0.0);
  auto idx = [&](Index q1, Index q2, Index n) { return (q1 * 3 + q2) * p.n_fock + n; };
  // Cavity detuning on |f f n>.
  CHECK(std::abs(h(idx(kAuxiliary, kAuxiliary, 3), idx(kAuxiliary, kAuxiliary, 3)) - 3.0 * p.delta) < 1e-13);
  // <e f 1| H |g f 0>: e^r g / 2 from the Rabi term, -e^-r g / 2 from the error term.
  const Complex up = h(idx(kExcited, kAuxiliary, 1), idx(kGround, kAuxiliary, 0));
  CHECK(std::abs(up - std::sinh(p.r_p)) < 1e-13);
  // Drive: <e f 0| H |g f 0> = -omega / 2.
  CHECK(std::abs(h(idx(kExcited, kAuxiliary, 0), idx(kGround, kAuxiliary, 0)) + p.omega / 2.0) < 1e-14);
  // The f level is dark.
  CHECK(std::abs(h(idx(kAuxiliary, kAuxiliary, 1), idx(kExcited, kAuxiliary, 0))) == 0.0);
}

TEST_CASE("lab frame maps onto the squeezed frame under the Bogoliubov rotation") {
  // H_lab in the drive frame, conjugated by the squeeze operator, equals the
  // squeezed-frame Hamiltonian up to a constant on low photon numbers.
  const Index n_big = 70;
  const Index n_small = 6;
  LabFrameParams lab;
  lab.omega_p = 20.0;
  lab.omega_drive = 10.0;
  lab.omega_a = 10.0 + 4.0;  // Delta_c = 4
  lab.pump_amplitude = 2.4;
  lab.omega_e = 10.0;        // qutrit on resonance with the drive frame
  lab.omega_g = 0.0;
  lab.drive_amplitude = 0.9;
  lab.g = 0.3;
  const double r = lab.squeeze_parameter();
  CHECK(std::abs(r - 0.5 * std::atanh(2.4 / 4.0)) < 1e-15);
  CHECK(std::abs(lab.squeezed_detuning() - 4.0 / std::cosh(2.0 * r)) < 1e-14);

  const SpaceLayout big = qutrit_pair_layout(n_big);
  const Operator h_lab = build_h_lab(lab, big);
  const Operator a = embed(big, kCavity, annihilator(n_big));
  const Operator gen = Complex(r / 2.0) * (a.adjoint() * a.adjoint() - a * a);
  const Operator s = expm(gen, Complex(1.0));
  const Matrix rotated = s.matrix().adjoint() * h_lab.matrix() * s.matrix();

  SystemParams p;
  p.g_m = lab.g;
  p.r_p = r;
  p.delta = lab.squeezed_detuning();
  p.omega = lab.drive_amplitude;
  p.n_fock = n_small;
  const Matrix h_s = build_h_s(p, 0.0).matrix();

  auto big_index = [&](Index q, Index n) { return q * n_big + n; };
  auto small_index = [&](Index q, Index n) { return q * n_small + n; };
  const Complex offset = rotated(big_index(8, 0), big_index(8, 0)) - h_s(small_index(8, 0), small_index(8, 0));
  double worst = 0.0;
  for (Index qi = 0; qi < 9; ++qi)
    for (Index ni = 0; ni < n_small - 1; ++ni)
      for (Index qj = 0; qj < 9; ++qj)
        for (Index nj = 0; nj < n_small - 1; ++nj) {
          Complex d = rotated(big_index(qi, ni), big_index(qj, nj)) - h_s(small_index(qi, ni), small_index(qj, nj));
          if (qi == qj && ni == nj) d -= offset;
          worst = std::max(worst, std::abs(d));
        }
  CHECK(worst < 1e-9);
}

TEST_CASE("interaction picture is the rotated Schroedinger Rabi Hamiltonian") {
  const SystemParams p = sample_params();
  const SystemOperators ops(p.n_fock);
  for (double t : {0.0, 0.41, 2.3}) {
    const Operator rot = expm(ops.number, Complex(0.0, p.delta * t));
    const Operator h_schr = build_h_rabi(p, t, false) - Complex(p.delta) * ops.number;
    const Matrix ref = rot.matrix() * h_schr.matrix() * rot.matrix().adjoint();
    CHECK(max_abs(build_h_rabi(p, t, true).matrix() - ref) < 1e-12);
  }
}

TEST_CASE("sine-squared envelope") {
  const PulseShape s = PulseShape::sine_squared(2.0);
  CHECK(s.amplitude(1.5, 0.0) == 0.0);
  CHECK(std::abs(s.amplitude(1.5, std::numbers::pi / 4.0) - 1.5) < 1e-15);
  CHECK(PulseShape::constant().amplitude(0.7, 123.0) == 0.7);
}

TEST_CASE("collapse operators") {
  SystemParams p = sample_params();
  p.kappa = 0.04;
  p.gamma = 0.09;
  const LindbladSpec l = build_lindblad(p, p.layout());
  const SpaceLayout layout = p.layout();
  const StateVector e_f_0 = StateVector::basis(layout, {kExcited, kAuxiliary, 0});
  const StateVector g_f_0 = StateVector::basis(layout, {kGround, kAuxiliary, 0});
  const StateVector f_f_0 = StateVector::basis(layout, {kAuxiliary, kAuxiliary, 0});
  CHECK(std::abs((l.L_g1 * e_f_0).inner(g_f_0) - 0.3) < 1e-15);
  CHECK(std::abs((l.L_f1 * e_f_0).inner(f_f_0) - 0.3) < 1e-15);
  CHECK((l.L_g2 * e_f_0).norm() == 0.0);
  const StateVector f_f_2 = StateVector::basis(layout, {kAuxiliary, kAuxiliary, 2});
  const StateVector f_f_1 = StateVector::basis(layout, {kAuxiliary, kAuxiliary, 1});
  CHECK(std::abs((l.L_a * f_f_2).inner(f_f_1) - 0.2 * std::sqrt(2.0)) < 1e-15);
  CHECK(l.operators().size() == 5);
}

TEST_CASE("invalid parameters are rejected") {
  SystemParams p = sample_params();
  p.kappa = -0.1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = sample_params();
  p.n_fock = 1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = sample_params();
  p.pulse = PulseShape::sine_squared(0.0);
  CHECK_THROWS_AS(squeezed_frame_hamiltonian(p), std::invalid_argument);

  LabFrameParams lab;
  lab.omega_a = 3.0;
  lab.omega_p = 4.0;
  lab.omega_drive = 2.0;
  lab.pump_amplitude = 1.5;  // above Delta_c = 1
  CHECK_THROWS_AS(lab.squeeze_parameter(), std::invalid_argument);
  lab.pump_amplitude = 0.5;
  lab.omega_drive = 2.1;
  CHECK_THROWS_AS(lab.validate(), std::invalid_argument);
}

TEST_CASE("Hamiltonian::without drops labelled terms") {
  const SystemParams p = sample_params();
  const Hamiltonian h = squeezed_frame_hamiltonian(p);
  const Hamiltonian ideal = h.without({kTermError});
  CHECK(ideal.terms().size() + 1 == h.terms().size());
  CHECK(max_abs((h.at(0.5) - ideal.at(0.5)).matrix() - build_h_err(p, 0.5).matrix()) < 1e-15);
}

}  // TEST_SUITE
