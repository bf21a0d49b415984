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

#include <gatesim/evolve.hpp>
#include <gatesim/gate.hpp>
#include <gatesim/metrics.hpp>

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace gatesim;

namespace {

SystemParams small_params() {
  SystemParams p;
  p.r_p = 0.5;
  p.delta = 2.0;
  p.omega = -0.8;
  p.n_fock = 6;
  return p;
}

EvolutionRequest request(const SystemParams& p, double t_final, int samples, double dt) {
  std::vector<double> times;
  for (int i = 0; i < samples; ++i) times.push_back(t_final * i / (samples - 1));
  times.back() = t_final;
  return EvolutionRequest{
      .hamiltonian = squeezed_frame_hamiltonian(p),
      .initial = initial_state(p.n_fock),
      .lindblad = std::nullopt,
      .t_final = t_final,
      .sample_times = times,
      .observables = standard_observables(p.n_fock),
      .step = StepControl{.dt_max = dt},
      .snapshots = SnapshotMode::full,
      .reduce_to = {kQutrit1, kQutrit2},
      .fock_factor = kCavity,
  };
}

}  // namespace

TEST_SUITE("evolve") {

TEST_CASE("constant Hamiltonian matches the matrix exponential") {
  const SystemParams p = small_params();
  const EvolutionRequest req = request(p, 1.7, 5, 1e-3);
  const EvolutionResult res = evolve_schrodinger(req);
  const Operator h = build_h_s(p, 0.0);
  for (std::size_t i = 0; i < res.times.size(); ++i) {
    const StateVector exact = expm(h, Complex(0.0, -res.times[i])) * std::get<StateVector>(req.initial);
    CHECK((res.states[i].amplitudes() - exact.amplitudes()).norm() < 1e-10);
  }
  CHECK(res.diagnostics.norm_drift < 1e-12);
}

TEST_CASE("Lindblad without collapse operators reproduces the pure state") {
  const SystemParams p = small_params();
  EvolutionRequest req = request(p, 1.0, 3, 2e-3);
  const EvolutionResult pure = evolve_schrodinger(req);
  req.initial = std::get<StateVector>(req.initial).projector();
  const EvolutionResult mixed = evolve_lindblad(req);
  REQUIRE(mixed.densities.size() == pure.states.size());
  for (std::size_t i = 0; i < pure.states.size(); ++i) {
    CHECK((mixed.densities[i].matrix() - pure.states[i].projector().matrix()).cwiseAbs().maxCoeff() < 1e-10);
  }
  for (const auto& [name, series] : pure.series) {
    for (std::size_t i = 0; i < series.size(); ++i) CHECK(std::abs(series[i] - mixed.series.at(name)[i]) < 1e-10);
  }
}

TEST_CASE("photon loss from a single photon is exponential") {
  SystemParams p;
  p.n_fock = 4;
  p.kappa = 0.3;
  const SystemOperators ops(p.n_fock);
  Hamiltonian h(ops.layout);
  h.add_constant(kTermCavity, ops.number, 1.1);
  EvolutionRequest req{
      .hamiltonian = h,
      .initial = StateVector::basis(ops.layout, {kAuxiliary, kAuxiliary, 1}).projector(),
      .lindblad = build_lindblad(p, ops.layout),
      .t_final = 3.0,
      .sample_times = {0.0, 1.0, 2.0, 3.0},
      .observables = {{"n", ops.number}},
      .step = StepControl{.dt_max = 1e-2},
  };
  const EvolutionResult res = evolve_lindblad(req);
  for (std::size_t i = 0; i < res.times.size(); ++i) {
    CHECK(std::abs(res.series.at("n")[i].real() - std::exp(-p.kappa * res.times[i])) < 1e-9);
  }
  CHECK(res.diagnostics.trace_drift < 1e-12);
}

TEST_CASE("qutrit relaxation empties |e> at twice gamma") {
  SystemParams p;
  p.n_fock = 2;
  p.gamma = 0.2;
  const SystemOperators ops(p.n_fock);
  Hamiltonian h(ops.layout);
  h.add_constant(kTermCavity, ops.number, 0.0);
  const Operator e1 = embed(ops.layout, kQutrit1, transition(3, kExcited, kExcited));
  const Operator f1 = embed(ops.layout, kQutrit1, transition(3, kAuxiliary, kAuxiliary));
  EvolutionRequest req{
      .hamiltonian = h,
      .initial = StateVector::basis(ops.layout, {kExcited, kAuxiliary, 0}).projector(),
      .lindblad = build_lindblad(p, ops.layout),
      .t_final = 2.0,
      .sample_times = {2.0},
      .observables = {{"e", e1}, {"f", f1}},
      .step = StepControl{.dt_max = 1e-2},
  };
  const EvolutionResult res = evolve_lindblad(req);
  const double pe = std::exp(-2.0 * p.gamma * 2.0);
  CHECK(std::abs(res.series.at("e")[0].real() - pe) < 1e-9);
  CHECK(std::abs(res.series.at("f")[0].real() - (1.0 - pe) / 2.0) < 1e-9);
}

TEST_CASE("Lindblad evolution conserves trace and stays physical") {
  SystemParams p = small_params();
  p.kappa = 0.1;
  p.gamma = 0.1;
  p.pulse = PulseShape::sine_squared(1.0);
  EvolutionRequest req = request(p, 3.0, 7, 5e-3);
  req.initial = std::get<StateVector>(req.initial).projector();
  req.lindblad = build_lindblad(p, p.layout());
  const EvolutionResult res = evolve(req);
  CHECK(res.diagnostics.trace_drift <= 1e-7);
  CHECK(res.diagnostics.hermiticity_drift <= 1e-9);
  CHECK(res.diagnostics.min_eigenvalue > -1e-5);
  // Only the (deliberately small) Fock ceiling may be flagged here.
  for (const auto& reason : res.diagnostics.reasons) CHECK(reason.find("Fock") != std::string::npos);
}

TEST_CASE("evolve dispatches pure inputs with collapse operators to Lindblad") {
  SystemParams p = small_params();
  p.kappa = 0.05;
  EvolutionRequest req = request(p, 0.5, 2, 5e-3);
  req.lindblad = build_lindblad(p, p.layout());
  req.snapshots = SnapshotMode::reduced;
  const EvolutionResult res = evolve(req);
  CHECK(res.pure());  // records the initial variant
  REQUIRE(res.densities.size() == 2);
  CHECK(res.densities.back().dim() == 9);
}

TEST_CASE("RK4 self-convergence is fourth order") {
  const GateDesign d = solve_unshaped(1, 0, 0, std::numbers::pi, 1.0);
  SystemParams p = d.system_params(8);
  EvolutionRequest req = request(p, d.tau, 11, recommended_step(p, 20));
  const ConvergenceReport rep = step_convergence_probe(req, 2, {}, 3);
  REQUIRE(rep.ratio.has_value());
  CHECK(*rep.ratio >= 10.0);
  CHECK(rep.dts.size() == 3);
  CHECK(rep.dts[1] == doctest::Approx(rep.dts[0] / 2.0));
}

TEST_CASE("adaptive stepping agrees with fine fixed steps") {
  const SystemParams p = small_params();
  EvolutionRequest fixed = request(p, 2.0, 3, 1e-3);
  EvolutionRequest adaptive = fixed;
  adaptive.step = StepControl{.dt_max = 0.1, .adaptive = true, .tolerance = 1e-11};
  const EvolutionResult a = evolve(fixed);
  const EvolutionResult b = evolve(adaptive);
  CHECK((a.states.back().amplitudes() - b.states.back().amplitudes()).norm() < 1e-8);
  CHECK(b.diagnostics.steps < a.diagnostics.steps);
}

TEST_CASE("a crowded Fock ceiling is flagged") {
  SystemParams p = small_params();
  p.n_fock = 3;
  p.r_p = 2.0;
  const EvolutionResult res = evolve(request(p, 1.0, 3, 1e-3));
  CHECK(res.diagnostics.flagged);
  CHECK(res.diagnostics.top_fock_population > kTopFockLimit);
  REQUIRE_FALSE(res.diagnostics.reasons.empty());
}

TEST_CASE("malformed requests are rejected") {
  const SystemParams p = small_params();
  EvolutionRequest req = request(p, 1.0, 3, 1e-3);
  req.sample_times = {0.5, 0.2};
  CHECK_THROWS_AS(evolve(req), std::invalid_argument);
  req = request(p, 1.0, 3, 1e-3);
  req.sample_times = {1.5};
  CHECK_THROWS_AS(evolve(req), std::invalid_argument);
  req = request(p, 1.0, 3, 0.0);
  CHECK_THROWS_AS(evolve(req), std::invalid_argument);

  // Non-Hermitian generator on the Lindblad path.
  const SystemOperators ops(p.n_fock);
  Hamiltonian bad(ops.layout);
  bad.add_constant("bad", ops.a, 1.0);
  req = request(p, 1.0, 3, 1e-3);
  req.hamiltonian = bad;
  req.lindblad = build_lindblad(p, p.layout());
  CHECK_THROWS_AS(evolve(req), std::invalid_argument);
}

TEST_CASE("recommended step resolves the fastest period") {
  SystemParams p = small_params();
  CHECK(recommended_step(p, 100) == doctest::Approx(2.0 * std::numbers::pi / p.delta / 100.0));
  p.pulse = PulseShape::sine_squared(5.0);
  CHECK(recommended_step(p, 100) == doctest::Approx(std::numbers::pi / 5.0 / 100.0));
}

}  // TEST_SUITE
