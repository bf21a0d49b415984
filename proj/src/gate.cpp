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

#include <gatesim/gate.hpp>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace gatesim {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Complex kI(0.0, 1.0);

// Distance of x from the nearest multiple of 2 pi.
double wrap_distance(double x) {
  const double r = std::remainder(x, 2.0 * kPi);
  return std::abs(r);
}

struct GaussRule {
  std::array<double, 10> nodes{};
  std::array<double, 10> weights{};
};

const GaussRule& gauss_rule() {
  static const GaussRule rule = [] {
    using Gauss = boost::math::quadrature::gauss<double, 10>;
    GaussRule r;
    const auto& x = Gauss::abscissa();
    const auto& w = Gauss::weights();
    std::size_t k = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      r.nodes[k] = -x[i];
      r.weights[k++] = w[i];
      r.nodes[k] = x[i];
      r.weights[k++] = w[i];
    }
    return r;
  }();
  return rule;
}

PhaseIntegrals nested_quadrature(const PulseShape& pulse, double g_m, double r_p, double delta,
                                 double omega, double t, int panels) {
  const GaussRule& rule = gauss_rule();
  const double enhance = std::exp(r_p);
  auto f_integrand = [&](double s) {
    return enhance * pulse.amplitude(g_m, s) * std::exp(Complex(0.0, -delta * s));
  };

  PhaseIntegrals out;
  out.t = t;
  out.B = -omega * t;
  if (t == 0.0) return out;

  const double h = t / panels;
  Complex F = 0.0;
  Complex G = 0.0;
  Complex A = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double x0 = k * h;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double y = x0 + 0.5 * h * (1.0 + rule.nodes[i]);
      // F(y) = F(x0) + integral over [x0, y]
      const double hy = y - x0;
      Complex partial = 0.0;
      for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        const double s = x0 + 0.5 * hy * (1.0 + rule.nodes[j]);
        partial += rule.weights[j] * f_integrand(s);
      }
      const Complex F_at_y = F + 0.5 * hy * partial;
      const double g_y = enhance * pulse.amplitude(g_m, y);
      const Complex phase = std::exp(Complex(0.0, delta * y));
      A += 0.5 * h * rule.weights[i] * F_at_y * g_y * phase;
      G += 0.5 * h * rule.weights[i] * g_y * phase;
    }
    Complex panel = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      panel += rule.weights[i] * f_integrand(x0 + 0.5 * h * (1.0 + rule.nodes[i]));
    }
    F += 0.5 * h * panel;
  }
  const Complex A_full = kI * A;
  out.F = F;
  out.G = G;
  out.A = A_full.real();
  out.A_imag = A_full.imag();
  return out;
}

double closure_tolerance(double scale) { return 1e-8 * std::max(1.0, scale); }

}  // namespace

PhaseIntegrals integrals_unshaped(double g_s, double delta, double omega, double t) {
  if (delta == 0.0) throw std::invalid_argument("integrals_unshaped: delta = 0 (resonant divergence)");
  PhaseIntegrals out;
  out.t = t;
  const Complex e_minus = std::exp(Complex(0.0, -delta * t));
  const Complex e_plus = std::exp(Complex(0.0, delta * t));
  out.F = kI * g_s / delta * (e_minus - 1.0);
  out.G = kI * g_s / delta * (1.0 - e_plus);
  const Complex A = -g_s * g_s / delta * (t - e_plus / (kI * delta) + 1.0 / (kI * delta));
  out.A = A.real();
  out.A_imag = A.imag();
  out.B = -omega * t;
  return out;
}

QuadratureResult quadrature_oracle(const PulseShape& pulse, double g_m, double r_p, double delta,
                                   double omega, double t, int subdivisions) {
  if (subdivisions < 1000) throw std::invalid_argument("quadrature_oracle: need >= 1000 subdivisions");
  QuadratureResult res;
  res.integrals = nested_quadrature(pulse, g_m, r_p, delta, omega, t, subdivisions);
  const PhaseIntegrals coarse = nested_quadrature(pulse, g_m, r_p, delta, omega, t, subdivisions / 2);
  res.error_estimate = std::max({std::abs(res.integrals.F - coarse.F), std::abs(res.integrals.G - coarse.G),
                                 std::abs(res.integrals.A - coarse.A)});
  const double scale = 1.0 + std::abs(res.integrals.A) + std::abs(res.integrals.F);
  res.converged = res.error_estimate <= 1e-10 * scale;
  return res;
}

ShapedIntegrals integrals_shaped(double g_m, double r_p, double delta, double alpha, double omega,
                                 double t) {
  if (!(delta > 0.0) || !(alpha > 0.0)) {
    throw std::invalid_argument("integrals_shaped: delta and alpha must be > 0");
  }
  const double gap = delta * delta - 4.0 * alpha * alpha;
  if (std::abs(gap) <= 1e-9 * std::max(delta * delta, 4.0 * alpha * alpha)) {
    throw std::invalid_argument("integrals_shaped: delta = 2 alpha makes the closed forms singular");
  }
  const double e_r = std::exp(r_p);
  const double a2 = alpha * alpha;
  const Complex e_minus = std::exp(Complex(0.0, -delta * t));
  const Complex e_plus = std::exp(Complex(0.0, delta * t));

  ShapedIntegrals out;
  PhaseIntegrals& cf = out.closed_form;
  cf.t = t;
  cf.B = -omega * t;
  const double denom = delta * (4.0 * a2 - delta * delta);
  cf.F = kI * 2.0 * e_r * g_m * a2 * (e_minus - 1.0) / denom;
  cf.G = kI * 2.0 * e_r * g_m * a2 * (1.0 - e_plus) / denom;
  const double d3 = delta * delta * delta;
  const double d5 = d3 * delta * delta;
  const Complex a_tilde = 3.0 * d5 * t - 20.0 * d3 * a2 * t +
                          kI * 32.0 * a2 * a2 * (e_plus - kI * delta * t - 1.0);
  const double base = d3 - 4.0 * delta * a2;
  const Complex A = e_r * e_r * g_m * g_m * a_tilde / (8.0 * base * base);
  cf.A = A.real();
  cf.A_imag = A.imag();

  // sin^2(x) = (1 - cos 2x) / 2 splits the integrand into three exponentials.
  const double wp = 2.0 * alpha - delta;
  const double wm = 2.0 * alpha + delta;
  const Complex flat = 0.5 * kI * (e_minus - 1.0) / delta;
  const Complex osc = 0.25 * ((std::exp(Complex(0.0, wp * t)) - 1.0) / (kI * wp) +
                              (std::exp(Complex(0.0, -wm * t)) - 1.0) / (-kI * wm));
  out.F_exact = e_r * g_m * (flat - osc);
  out.G_exact = std::conj(out.F_exact);

  out.quadrature =
      quadrature_oracle(PulseShape::sine_squared(alpha), g_m, r_p, delta, omega, t);
  return out;
}

double shaped_phase_magnitude(double g_m, double r_p, double alpha, int m) {
  if (m < 2) throw std::invalid_argument("shaped_phase_magnitude: m = k + 1 must be >= 2");
  const double mm = static_cast<double>(m) * m;
  return std::exp(2.0 * r_p) * g_m * g_m * kPi * (3.0 * mm - 2.0) /
         (16.0 * m * alpha * alpha * (mm - 1.0));
}

std::string GateDesign::label() const {
  if (const auto* s = std::get_if<ShapedGate>(&variant)) return fmt::format("shaped_k{}", s->order);
  const auto& u = std::get<UnshapedGate>(variant);
  return fmt::format("unshaped_{}_{}_{}", u.k1, u.k2, u.k3);
}

PulseShape GateDesign::pulse() const {
  return shaped() ? PulseShape::sine_squared(alpha) : PulseShape::constant();
}

SystemParams GateDesign::system_params(Index n_fock, double kappa, double gamma) const {
  SystemParams p;
  p.g_m = g_m;
  p.r_p = r_p;
  p.delta = delta;
  p.omega = omega;
  p.kappa = kappa;
  p.gamma = gamma;
  p.n_fock = n_fock;
  p.pulse = pulse();
  return p;
}

PhaseIntegrals GateDesign::phases_at_gate_time() const {
  if (!shaped()) return integrals_unshaped(g_m * std::exp(r_p), delta, omega, tau);
  return quadrature_oracle(pulse(), g_m, r_p, delta, omega, tau).integrals;
}

void GateDesign::validate() const {
  if (!(tau > 0.0) || !(delta > 0.0) || !std::isfinite(omega)) {
    throw std::invalid_argument("GateDesign: tau and delta must be positive and finite");
  }
  if (const auto* u = std::get_if<UnshapedGate>(&variant)) {
    if (std::abs(delta * tau - 2.0 * kPi * u->k1) > 1e-10 * std::max(1.0, delta * tau)) {
      throw std::invalid_argument("GateDesign: delta tau != 2 k1 pi");
    }
  } else {
    const int m = std::get<ShapedGate>(variant).order + 1;
    if (std::abs(delta * tau - 2.0 * kPi * m) > 1e-10 * std::max(1.0, delta * tau)) {
      throw std::invalid_argument("GateDesign: delta tau != 2 (k + 1) pi");
    }
    if (std::abs(alpha * tau - kPi) > 1e-10) {
      throw std::invalid_argument("GateDesign: alpha tau != pi");
    }
  }
  const PhaseIntegrals ph = phases_at_gate_time();
  const double scale = g_m * std::exp(r_p) * tau;
  if (std::abs(ph.F) > closure_tolerance(scale) || std::abs(ph.G) > closure_tolerance(scale)) {
    throw std::invalid_argument(
        fmt::format("GateDesign: trajectory does not close (|F| = {:.3e}, |G| = {:.3e})",
                    std::abs(ph.F), std::abs(ph.G)));
  }
  if (std::abs(ph.A_imag) > 1e-8 * std::max(1.0, std::abs(ph.A))) {
    throw std::invalid_argument("GateDesign: complex remainder of A(tau) does not vanish");
  }
  if (wrap_distance(ph.A / 4.0 + ph.B / 2.0) > 1e-8) {
    throw std::invalid_argument("GateDesign: A/4 + B/2 is not a multiple of 2 pi");
  }
  if (wrap_distance(ph.A + ph.B + phi) > 1e-8) {
    throw std::invalid_argument("GateDesign: A + B != -phi (mod 2 pi)");
  }
}

GateDesign solve_unshaped(int k1, int k2, int k3, double phi, double r_p, double g_m) {
  if (k1 < 1) throw std::invalid_argument("solve_unshaped: constraint k1 >= 1 violated");
  if (!std::isfinite(phi)) throw std::invalid_argument("solve_unshaped: phi must be finite");
  // With A/4 + B/2 = -2 k2 pi and A + B = -(2 k3 pi + phi):
  //   A = -2 (2 k3 pi + phi - 4 k2 pi),  B = 2 k3 pi + phi - 8 k2 pi.
  const double phase_sum = 2.0 * k3 * kPi + phi - 4.0 * k2 * kPi;
  if (!(phase_sum > 0.0)) {
    throw std::invalid_argument(fmt::format(
        "solve_unshaped: constraint 2 k3 pi + phi - 4 k2 pi > 0 violated (got {:.6g}); "
        "for phi = pi this is k3 >= 2 k2 - 1/2",
        phase_sum));
  }
  const double A = -2.0 * phase_sum;
  const double B = phase_sum - 4.0 * k2 * kPi;
  const double g_s = g_m * std::exp(r_p);

  GateDesign d;
  d.variant = UnshapedGate{k1, k2, k3};
  d.phi = phi;
  d.r_p = r_p;
  d.g_m = g_m;
  d.delta = g_s * std::sqrt(2.0 * k1 * kPi / -A);
  d.tau = 2.0 * k1 * kPi / d.delta;
  d.omega = -B / d.tau;
  if (std::abs(phi - kPi) < 1e-12) {
    const Discrepancy disc = unshaped_phase_discrepancy(k1, k2, k3);
    d.warnings.push_back(disc.message);
  }
  d.validate();
  return d;
}

GateDesign solve_shaped(int k, double r_p, double g_m, double phi) {
  if (k < 1) throw std::invalid_argument("solve_shaped: order k must be >= 1");
  if (!(phi > 0.0) || !std::isfinite(phi)) throw std::invalid_argument("solve_shaped: phi must be > 0");
  if (!(g_m > 0.0)) throw std::invalid_argument("solve_shaped: g_m must be > 0");
  const int m = k + 1;
  const double mm = static_cast<double>(m) * m;
  const double target = 2.0 * phi;  // |A'(tau)|, with B(tau) = phi

  // |A'| is proportional to 1 / alpha^2 along the family delta = 2 m alpha,
  // tau = pi / alpha; the closed-form root seeds the bracket.
  const double guess = std::exp(r_p) * g_m *
                       std::sqrt(kPi * (3.0 * mm - 2.0) / (target * 16.0 * m * (mm - 1.0)));
  auto residual = [&](double alpha) {
    const PhaseIntegrals ph = nested_quadrature(PulseShape::sine_squared(alpha), g_m, r_p,
                                                2.0 * m * alpha, 0.0, kPi / alpha, 2000);
    return std::abs(ph.A) - target;
  };
  double alpha = 0.0;
  try {
    auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-12 * std::abs(b); };
    const auto [lo, hi] = boost::math::tools::bisect(residual, 0.1 * guess, 10.0 * guess, tol);
    alpha = 0.5 * (lo + hi);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("solve_shaped: root solve failed to bracket: ") + e.what());
  }

  GateDesign d;
  d.variant = ShapedGate{k};
  d.phi = phi;
  d.r_p = r_p;
  d.g_m = g_m;
  d.alpha = alpha;
  d.delta = 2.0 * m * alpha;
  d.tau = kPi / alpha;
  d.omega = -phi / d.tau;

  const ShapedIntegrals at_tau = integrals_shaped(g_m, r_p, d.delta, alpha, d.omega, d.tau);
  const double propagator_phase = at_tau.quadrature.integrals.A;
  if (at_tau.closed_form.A * propagator_phase < 0.0) {
    d.warnings.push_back(fmt::format(
        "closed-form shaped phase A'(tau) = {:.9g} has the opposite sign to the propagator "
        "phase {:.9g}; the propagator sign is used",
        at_tau.closed_form.A, propagator_phase));
  }
  d.validate();
  return d;
}

Operator logical_gate_matrix(const GateDesign& design) {
  Matrix u = Matrix::Identity(4, 4);
  u(3, 3) = std::exp(Complex(0.0, design.phi));
  return Operator(SpaceLayout({2, 2}), std::move(u));
}

Discrepancy unshaped_phase_discrepancy(int k1, int k2, int k3) {
  Discrepancy d;
  d.code = "unshaped-phase-factor";
  d.quoted = -(2.0 * k3 + 1.0 - 4.0 * k2) * kPi;
  d.computed = -2.0 * (2.0 * k3 + 1.0 - 4.0 * k2) * kPi;
  d.message = fmt::format(
      "gate phase quoted as -(2k3+1-4k2)pi = {:.9g} for (k1,k2,k3) = ({},{},{}), but the phase "
      "conditions give A(tau) = -2(2k3+1-4k2)pi = {:.9g} (factor 2); the constraint value is used",
      d.quoted, k1, k2, k3, d.computed);
  return d;
}

}  // namespace gatesim
