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

#include <gatesim/metrics.hpp>
#include <gatesim/parallel.hpp>

#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>

namespace gatesim {

namespace {

using RowMajorMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
constexpr Index kQutritPairDim = 9;

const SpaceLayout& qutrit_layout() {
  static const SpaceLayout layout{3, 3};
  return layout;
}

void require_pair_layout(const SpaceLayout& layout, const char* where) {
  if (layout.factors() != 3 || layout.factor(kQutrit1) != 3 || layout.factor(kQutrit2) != 3) {
    throw std::invalid_argument(std::string(where) + ": layout must be {3, 3, n_fock}");
  }
}

// Amplitudes of |q, n> viewed as a 9 x n_fock matrix.
Eigen::Map<const RowMajorMatrix> as_qutrit_by_cavity(const StateVector& psi) {
  require_pair_layout(psi.layout(), "as_qutrit_by_cavity");
  const Index n = psi.layout().factor(kCavity);
  return Eigen::Map<const RowMajorMatrix>(psi.amplitudes().data(), kQutritPairDim, n);
}

Matrix reduced_qutrits(const StateVector& psi) {
  const auto m = as_qutrit_by_cavity(psi);
  return m * m.adjoint();
}

Matrix reduced_qutrits(const DensityMatrix& rho) {
  if (rho.layout() == qutrit_layout()) return rho.matrix();
  require_pair_layout(rho.layout(), "reduced_qutrits");
  return partial_trace(rho, {kQutrit1, kQutrit2}).matrix();
}

bool matches_initial(const std::variant<StateVector, DensityMatrix>& init) {
  if (const auto* psi = std::get_if<StateVector>(&init)) {
    if (psi->layout().factors() != 3) return false;
    const StateVector ref = initial_state(psi->layout().factor(kCavity));
    return psi->layout() == ref.layout() && (psi->amplitudes() - ref.amplitudes()).cwiseAbs().maxCoeff() <= 1e-9;
  }
  const auto& rho = std::get<DensityMatrix>(init);
  if (rho.layout().factors() != 3) return false;
  const DensityMatrix ref = initial_state(rho.layout().factor(kCavity)).projector();
  return rho.layout() == ref.layout() && (rho.matrix() - ref.matrix()).cwiseAbs().maxCoeff() <= 1e-9;
}

Matrix embed_logical(const Matrix& u, Index n_fock) {
  const Matrix v = LogicalBasis::isometry();
  const Matrix q = v * u * v.adjoint();
  const Index n = n_fock;
  Matrix out = Matrix::Zero(kQutritPairDim * n, kQutritPairDim * n);
  for (Index i = 0; i < kQutritPairDim; ++i) {
    for (Index j = 0; j < kQutritPairDim; ++j) out(i * n, j * n) = q(i, j);
  }
  return out;
}

}  // namespace

Matrix LogicalBasis::qutrit_isometry() {
  Matrix v = Matrix::Zero(3, 2);
  v(kAuxiliary, 0) = 1.0;
  v(kExcited, 1) = std::numbers::sqrt2 / 2.0;
  v(kGround, 1) = std::numbers::sqrt2 / 2.0;
  return v;
}

Vector LogicalBasis::leakage_ket() {
  Vector v = Vector::Zero(3);
  v(kExcited) = std::numbers::sqrt2 / 2.0;
  v(kGround) = -std::numbers::sqrt2 / 2.0;
  return v;
}

Matrix LogicalBasis::isometry() {
  // kron of rectangular blocks: rows follow the qutrit pair, columns the qubits.
  const Matrix q = qutrit_isometry();
  Matrix out(kQutritPairDim, kDim);
  for (Index i = 0; i < 3; ++i) {
    for (Index j = 0; j < 3; ++j) {
      for (Index a = 0; a < 2; ++a) {
        for (Index b = 0; b < 2; ++b) out(3 * i + j, 2 * a + b) = q(i, a) * q(j, b);
      }
    }
  }
  return out;
}

StateVector LogicalBasis::branch(int s) {
  if (s < 0 || s >= kDim) throw std::invalid_argument("LogicalBasis::branch: s must be in [0, 4)");
  return StateVector(qutrit_layout(), isometry().col(s));
}

StateVector initial_state(Index n_fock) {
  const Vector logical = Vector::Constant(LogicalBasis::kDim, 0.5);
  const StateVector q(qutrit_layout(), LogicalBasis::isometry() * logical);
  return kron(q, StateVector::basis(SpaceLayout{n_fock}, {0}));
}

StateVector branch_initial_state(int s, Index n_fock) {
  return kron(LogicalBasis::branch(s), StateVector::basis(SpaceLayout{n_fock}, {0}));
}

StateVector target_state(const GateDesign& design) {
  const Vector logical = Vector::Constant(LogicalBasis::kDim, 0.5);
  return StateVector(qutrit_layout(), LogicalBasis::isometry() * (logical_gate_matrix(design).matrix() * logical));
}

std::vector<Observable> standard_observables(Index n_fock) {
  const SpaceLayout layout = qutrit_pair_layout(n_fock);
  const Operator a = embed(layout, kCavity, annihilator(n_fock));
  return {{kObsPhotonNumber, a.adjoint() * a}, {kObsField, a}};
}

std::vector<double> state_fidelity(const EvolutionResult& result, const GateDesign& design) {
  if (!matches_initial(result.initial)) {
    throw std::invalid_argument("state_fidelity: evolution must start from the logical initial state");
  }
  const Vector target = target_state(design).amplitudes();
  std::vector<double> out;
  auto push = [&](const Matrix& rho_q) { out.push_back((target.adjoint() * rho_q * target)(0, 0).real()); };
  for (const auto& psi : result.states) push(reduced_qutrits(psi));
  for (const auto& rho : result.densities) push(reduced_qutrits(rho));
  return out;
}

LogicalChannel unitary_channel(const Hamiltonian& h, const std::vector<double>& sample_times,
                               const StepControl& step, std::size_t workers) {
  require_pair_layout(h.layout(), "unitary_channel");
  const Index n_fock = h.layout().factor(kCavity);
  const double t_final = sample_times.empty() ? 0.0 : sample_times.back();

  std::vector<std::optional<EvolutionResult>> runs(LogicalBasis::kDim);
  parallel_for(
      runs.size(),
      [&](std::size_t j) {
        EvolutionRequest req{
            .hamiltonian = h,
            .initial = branch_initial_state(static_cast<int>(j), n_fock),
            .lindblad = std::nullopt,
            .t_final = t_final,
            .sample_times = sample_times,
            .observables = {},
            .step = step,
            .snapshots = SnapshotMode::full,
            .reduce_to = {kQutrit1, kQutrit2},
            .fock_factor = kCavity,
        };
        runs[j] = evolve_schrodinger(req);
      },
      workers);

  // blocks[t][4 j + k] = V^dagger Tr_cav |psi_j(t)><psi_k(t)| V
  const Matrix v = LogicalBasis::isometry();
  auto blocks = std::make_shared<std::vector<std::array<Matrix, 16>>>(sample_times.size());
  auto diagnostics = std::make_shared<Diagnostics>();
  for (const auto& run : runs) diagnostics->merge(run->diagnostics);
  for (std::size_t t = 0; t < sample_times.size(); ++t) {
    for (Index j = 0; j < LogicalBasis::kDim; ++j) {
      const auto mj = as_qutrit_by_cavity(runs[j]->states[t]);
      for (Index k = 0; k < LogicalBasis::kDim; ++k) {
        const auto mk = as_qutrit_by_cavity(runs[k]->states[t]);
        (*blocks)[t][4 * j + k] = v.adjoint() * (mj * mk.adjoint()) * v;
      }
    }
  }
  return [blocks, diagnostics](const Matrix& u) {
    if (u.rows() != LogicalBasis::kDim || u.cols() != LogicalBasis::kDim) {
      throw std::invalid_argument("unitary_channel: input must be 4 x 4");
    }
    ChannelOutput out{.outputs = {}, .diagnostics = *diagnostics};
    for (const auto& b : *blocks) {
      Matrix acc = Matrix::Zero(LogicalBasis::kDim, LogicalBasis::kDim);
      for (Index j = 0; j < LogicalBasis::kDim; ++j) {
        for (Index k = 0; k < LogicalBasis::kDim; ++k) {
          if (u(j, k) != Complex(0.0)) acc += u(j, k) * b[4 * j + k];
        }
      }
      out.outputs.push_back(std::move(acc));
    }
    return out;
  };
}

LogicalChannel lindblad_channel(const Hamiltonian& h, std::optional<LindbladSpec> lindblad,
                                const std::vector<double>& sample_times, const StepControl& step) {
  require_pair_layout(h.layout(), "lindblad_channel");
  return [h, lindblad = std::move(lindblad), sample_times, step](const Matrix& u) {
    if (u.rows() != LogicalBasis::kDim || u.cols() != LogicalBasis::kDim) {
      throw std::invalid_argument("lindblad_channel: input must be 4 x 4");
    }
    const Index n_fock = h.layout().factor(kCavity);
    EvolutionRequest req{
        .hamiltonian = h,
        .initial = DensityMatrix(h.layout(), embed_logical(u, n_fock)),
        .lindblad = lindblad,
        .t_final = sample_times.empty() ? 0.0 : sample_times.back(),
        .sample_times = sample_times,
        .observables = {},
        .step = step,
        .snapshots = SnapshotMode::reduced,
        .reduce_to = {kQutrit1, kQutrit2},
        .fock_factor = kCavity,
    };
    EvolutionResult res = evolve_lindblad(req);
    const Matrix v = LogicalBasis::isometry();
    ChannelOutput out{.outputs = {}, .diagnostics = res.diagnostics};
    for (const auto& rho : res.densities) out.outputs.push_back(v.adjoint() * rho.matrix() * v);
    return out;
  };
}

LogicalChannel conjugation_channel(const Matrix& unitary) {
  return [unitary](const Matrix& u) {
    return ChannelOutput{.outputs = {unitary * u * unitary.adjoint()}, .diagnostics = {}};
  };
}

LogicalChannel depolarizing_channel() {
  return [](const Matrix& u) {
    const Index d = LogicalBasis::kDim;
    return ChannelOutput{.outputs = {Matrix::Identity(d, d) * (u.trace() / static_cast<double>(d))},
                         .diagnostics = {}};
  };
}

std::array<Matrix, 16> logical_paulis() {
  std::array<Matrix, 4> s;
  s[0] = Matrix::Identity(2, 2);
  s[1] = Matrix::Zero(2, 2);
  s[1] << 0.0, 1.0, 1.0, 0.0;
  s[2] = Matrix::Zero(2, 2);
  s[2] << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  s[3] = Matrix::Zero(2, 2);
  s[3] << 1.0, 0.0, 0.0, -1.0;
  std::array<Matrix, 16> out;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) out[4 * a + b] = kron(Operator(SpaceLayout{2}, s[a]), Operator(SpaceLayout{2}, s[b])).matrix();
  }
  return out;
}

AverageFidelity average_fidelity(const LogicalChannel& channel, const Matrix& target_unitary,
                                 std::size_t workers) {
  const Index d = LogicalBasis::kDim;
  if (target_unitary.rows() != d || target_unitary.cols() != d) {
    throw std::invalid_argument("average_fidelity: target must be 4 x 4");
  }
  const auto paulis = logical_paulis();
  std::array<std::optional<ChannelOutput>, 16> outputs;
  parallel_for(paulis.size(), [&](std::size_t l) { outputs[l] = channel(paulis[l]); }, workers);

  AverageFidelity result;
  const std::size_t n_times = outputs[0]->outputs.size();
  result.values.assign(n_times, 0.0);
  for (std::size_t l = 0; l < paulis.size(); ++l) {
    result.diagnostics.merge(outputs[l]->diagnostics);
    if (outputs[l]->outputs.size() != n_times) throw std::logic_error("average_fidelity: ragged channel output");
    const Matrix ideal = target_unitary * paulis[l].adjoint() * target_unitary.adjoint();
    for (std::size_t t = 0; t < n_times; ++t) {
      result.values[t] += (ideal * outputs[l]->outputs[t]).trace().real();
    }
  }
  const double dd = static_cast<double>(d * d);
  for (double& v : result.values) v = (v + dd) / (dd * (d + 1));
  return result;
}

AverageFidelity average_fidelity(const LogicalChannel& channel, const GateDesign& design, std::size_t workers) {
  return average_fidelity(channel, logical_gate_matrix(design).matrix(), workers);
}

std::vector<double> unwrap_phases(const std::vector<double>& raw) {
  std::vector<double> out(raw.size());
  if (raw.empty()) return out;
  const double two_pi = 2.0 * std::numbers::pi;
  out[0] = raw[0];
  for (std::size_t i = 1; i < raw.size(); ++i) {
    const double step = raw[i] - raw[i - 1];
    out[i] = out[i - 1] + (step - two_pi * std::round(step / two_pi));
  }
  return out;
}

PopulationPhaseReport populations_and_phases(const EvolutionResult& result) {
  if (!result.pure() || result.states.empty()) {
    throw std::invalid_argument("populations_and_phases: needs a pure-state run with snapshots");
  }
  if (!matches_initial(result.initial)) {
    throw std::invalid_argument("populations_and_phases: evolution must start from the logical initial state");
  }
  const Matrix v = LogicalBasis::isometry();
  PopulationPhaseReport report;
  report.times = result.times;
  std::array<std::vector<double>, 4> raw;
  for (const auto& psi : result.states) {
    const auto m = as_qutrit_by_cavity(psi);
    const Matrix rho_q = m * m.adjoint();
    const Vector vacuum = m.col(0);
    const Vector amps = v.adjoint() * vacuum;
    for (int s = 0; s < 4; ++s) {
      report.populations[s].push_back((v.col(s).adjoint() * rho_q * v.col(s))(0, 0).real());
      raw[s].push_back(std::arg(amps(s)) - std::arg(amps(0)));
    }
  }
  for (int s = 0; s < 4; ++s) report.phases[s] = unwrap_phases(raw[s]);
  return report;
}

namespace {

template <typename Fn>
std::vector<Complex> from_snapshots(const EvolutionResult& result, const char* what, Fn&& observable) {
  std::vector<Complex> out;
  for (const auto& psi : result.states) out.push_back(expectation(observable(psi.layout()), psi));
  for (const auto& rho : result.densities) {
    if (rho.layout().factors() != 3) {
      throw std::invalid_argument(std::string(what) + ": reduced snapshots carry no cavity; request the series");
    }
    out.push_back(expectation(observable(rho.layout()), rho));
  }
  return out;
}

Operator cavity_annihilator(const SpaceLayout& layout) {
  require_pair_layout(layout, "cavity_annihilator");
  return embed(layout, kCavity, annihilator(layout.factor(kCavity)));
}

}  // namespace

std::vector<double> photon_number(const EvolutionResult& result) {
  std::vector<Complex> values;
  if (auto it = result.series.find(kObsPhotonNumber); it != result.series.end()) {
    values = it->second;
  } else {
    values = from_snapshots(result, "photon_number", [](const SpaceLayout& layout) {
      const Operator a = cavity_annihilator(layout);
      return a.adjoint() * a;
    });
  }
  std::vector<double> out;
  for (const Complex& v : values) out.push_back(v.real());
  return out;
}

std::vector<PhasePoint> phase_space_trajectory(const EvolutionResult& result) {
  std::vector<Complex> values;
  if (auto it = result.series.find(kObsField); it != result.series.end()) {
    values = it->second;
  } else {
    values = from_snapshots(result, "phase_space_trajectory", cavity_annihilator);
  }
  std::vector<PhasePoint> out;
  for (const Complex& v : values) out.push_back({v.real(), v.imag()});
  return out;
}

ValidityReport rabi_validity_fidelity(const SystemParams& p, double t_final, std::size_t samples,
                                      const StepControl& step, bool include_error) {
  if (samples < 2) throw std::invalid_argument("rabi_validity_fidelity: samples must be >= 2");
  if (!(t_final > 0.0)) throw std::invalid_argument("rabi_validity_fidelity: t_final must be > 0");
  std::vector<double> times(samples);
  for (std::size_t i = 0; i < samples; ++i) times[i] = t_final * static_cast<double>(i) / static_cast<double>(samples - 1);
  times.back() = t_final;

  const Hamiltonian rabi = rabi_hamiltonian(p, Picture::schrodinger);
  const Hamiltonian exact = include_error ? squeezed_frame_hamiltonian(p) : rabi;
  auto run = [&](const Hamiltonian& h) {
    return evolve_schrodinger(EvolutionRequest{
        .hamiltonian = h,
        .initial = initial_state(p.n_fock),
        .lindblad = std::nullopt,
        .t_final = t_final,
        .sample_times = times,
        .observables = {},
        .step = step,
        .snapshots = SnapshotMode::full,
        .reduce_to = {kQutrit1, kQutrit2},
        .fock_factor = kCavity,
    });
  };
  const EvolutionResult a = run(rabi);
  const EvolutionResult b = run(exact);
  ValidityReport report;
  report.times = times;
  report.diagnostics.merge(a.diagnostics);
  report.diagnostics.merge(b.diagnostics);
  for (std::size_t i = 0; i < samples; ++i) report.fidelity.push_back(std::norm(a.states[i].inner(b.states[i])));
  return report;
}

}  // namespace gatesim
