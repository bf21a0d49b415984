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

#include <Eigen/Sparse>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace gatesim {

namespace {

using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;
constexpr Complex kMinusI(0.0, -1.0);

SparseMatrix to_sparse(const Matrix& m) { return m.sparseView(Complex(0.0), 1e-300); }

// out = s * x for row-major sparse s and column-major dense x. Real
// arithmetic avoids the NaN recovery path of std::complex multiplication.
template <typename Dense>
void sparse_times_dense(const SparseMatrix& s, const Dense& x, Matrix& out) {
  out.resize(s.rows(), x.cols());
  const auto* outer = s.outerIndexPtr();
  const auto* inner = s.innerIndexPtr();
  const Complex* val = s.valuePtr();
  for (Index j = 0; j < x.cols(); ++j) {
    const Complex* col = x.col(j).data();
    Complex* dst = out.col(j).data();
    for (Index i = 0; i < s.rows(); ++i) {
      double re = 0.0;
      double im = 0.0;
      for (auto p = outer[i]; p < outer[i + 1]; ++p) {
        const double a = val[p].real();
        const double b = val[p].imag();
        const Complex& z = col[inner[p]];
        re += a * z.real() - b * z.imag();
        im += a * z.imag() + b * z.real();
      }
      dst[i] = Complex(re, im);
    }
  }
}

using RowMajorMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// out (+)= s * x with x row-major: one contiguous row update per nonzero.
template <typename Dense>
void sparse_times_rows(const SparseMatrix& s, const Dense& x, RowMajorMatrix& out, bool accumulate) {
  if (!accumulate) out.setZero(s.rows(), x.cols());
  const auto* outer = s.outerIndexPtr();
  const auto* inner = s.innerIndexPtr();
  const Complex* val = s.valuePtr();
  for (Index i = 0; i < s.rows(); ++i) {
    auto dst = out.row(i);
    for (auto p = outer[i]; p < outer[i + 1]; ++p) dst += val[p] * x.row(inner[p]);
  }
}

// Generator M(t) = constant + sum_i c_i(t) op_i on the union sparsity pattern
// of its terms, so a stage recombines values and runs one sparse product.
class MergedGenerator {
 public:
  MergedGenerator(const Hamiltonian& h, Complex scale, const SparseMatrix* constant) {
    const Index n = h.layout().total();
    std::vector<SparseMatrix> ops;
    for (const auto& term : h.terms()) {
      ops.push_back(to_sparse(term.op.matrix()));
      coefficients_.push_back(term.coefficient);
    }
    // Absolute values so that no entry cancels out of the pattern.
    pattern_ = SparseMatrix(n, n);
    for (const auto& op : ops) pattern_ += SparseMatrix(op.cwiseAbs().cast<Complex>());
    if (constant) pattern_ += SparseMatrix(constant->cwiseAbs().cast<Complex>());
    pattern_.makeCompressed();

    const auto nnz = pattern_.nonZeros();
    for (const auto& op : ops) values_.push_back(scale * aligned(op));
    constant_ = constant ? aligned(*constant) : Eigen::VectorXcd::Zero(nnz);
    scratch_.resize(nnz);
  }

  const SparseMatrix& at(double t) {
    scratch_ = constant_;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      const Complex c = coefficients_[i](t);
      if (c != Complex(0.0)) scratch_ += c * values_[i];
    }
    std::copy(scratch_.data(), scratch_.data() + scratch_.size(), pattern_.valuePtr());
    return pattern_;
  }

 private:
  Eigen::VectorXcd aligned(const SparseMatrix& op) const {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(pattern_.nonZeros());
    const auto* outer = pattern_.outerIndexPtr();
    const auto* inner = pattern_.innerIndexPtr();
    for (Index r = 0; r < op.outerSize(); ++r) {
      auto pos = outer[r];
      for (SparseMatrix::InnerIterator it(op, r); it; ++it) {
        while (pos < outer[r + 1] && inner[pos] < it.col()) ++pos;
        if (pos == outer[r + 1] || inner[pos] != it.col()) throw std::logic_error("MergedGenerator: pattern miss");
        out(pos) = it.value();
      }
    }
    return out;
  }

  SparseMatrix pattern_;
  std::vector<std::function<Complex(double)>> coefficients_;
  std::vector<Eigen::VectorXcd> values_;
  Eigen::VectorXcd constant_;
  Eigen::VectorXcd scratch_;
};

// Sample times validated and the step schedule between them.
void check_request(const EvolutionRequest& req) {
  if (!(req.t_final >= 0.0)) throw std::invalid_argument("EvolutionRequest: t_final must be >= 0");
  if (!(req.step.dt_max > 0.0)) throw std::invalid_argument("EvolutionRequest: dt_max must be > 0");
  if (!std::is_sorted(req.sample_times.begin(), req.sample_times.end())) {
    throw std::invalid_argument("EvolutionRequest: sample_times must be sorted");
  }
  for (double t : req.sample_times) {
    if (t < 0.0 || t > req.t_final) {
      throw std::invalid_argument("EvolutionRequest: sample time outside [0, t_final]");
    }
  }
  for (const auto& obs : req.observables) {
    if (!(obs.op.layout() == req.hamiltonian.layout())) {
      throw std::invalid_argument("EvolutionRequest: observable '" + obs.name + "' layout mismatch");
    }
  }
}

template <typename State, typename Rhs>
void rk4_step(State& y, double t, double dt, const Rhs& rhs, State& k1, State& k2, State& k3,
              State& k4, State& tmp) {
  rhs(t, y, k1);
  tmp = y + (0.5 * dt) * k1;
  rhs(t + 0.5 * dt, tmp, k2);
  tmp = y + (0.5 * dt) * k2;
  rhs(t + 0.5 * dt, tmp, k3);
  tmp = y + dt * k3;
  rhs(t + dt, tmp, k4);
  y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Advances y from t0 to t1. Fixed mode uses equal steps no longer than
// dt_max; adaptive mode uses RK4 step doubling.
template <typename State, typename Rhs>
std::size_t advance(State& y, double t0, double t1, const StepControl& control, const Rhs& rhs) {
  if (t1 <= t0) return 0;
  State k1 = y, k2 = y, k3 = y, k4 = y, tmp = y;
  if (!control.adaptive) {
    const double span = t1 - t0;
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(span / control.dt_max - 1e-9)));
    const double dt = span / static_cast<double>(n);
    for (std::size_t s = 0; s < n; ++s) {
      rk4_step(y, t0 + static_cast<double>(s) * dt, dt, rhs, k1, k2, k3, k4, tmp);
    }
    return n;
  }

  std::size_t steps = 0;
  double t = t0;
  double dt = std::min(control.dt_max, t1 - t0);
  State full = y, half = y;
  while (t < t1) {
    dt = std::min(dt, t1 - t);
    full = y;
    rk4_step(full, t, dt, rhs, k1, k2, k3, k4, tmp);
    half = y;
    rk4_step(half, t, 0.5 * dt, rhs, k1, k2, k3, k4, tmp);
    rk4_step(half, t + 0.5 * dt, 0.5 * dt, rhs, k1, k2, k3, k4, tmp);
    const double err = (full - half).cwiseAbs().maxCoeff() / 15.0;
    if (err <= control.tolerance || dt < 1e-14 * std::max(1.0, t1)) {
      // Richardson extrapolation of the two estimates.
      y = half + (half - full) / 15.0;
      t = (t1 - t - dt <= 1e-14 * std::max(1.0, t1)) ? t1 : t + dt;
      ++steps;
    }
    const double grow = err > 0.0 ? 0.9 * std::pow(control.tolerance / err, 0.2) : 4.0;
    dt = std::min(control.dt_max, dt * std::clamp(grow, 0.2, 4.0));
  }
  return steps;
}

double top_fock_population(const EvolutionRequest& req, const Vector& diag_population) {
  if (!req.fock_factor) return 0.0;
  const SpaceLayout& layout = req.hamiltonian.layout();
  const std::size_t f = *req.fock_factor;
  if (f >= layout.factors()) throw std::invalid_argument("EvolutionRequest: fock_factor out of range");
  Index inner = 1;
  for (std::size_t k = f + 1; k < layout.factors(); ++k) inner *= layout.factor(k);
  const Index n = layout.factor(f);
  double pop = 0.0;
  for (Index i = 0; i < diag_population.size(); ++i) {
    const Index level = (i / inner) % n;
    if (level >= n - 2) pop += diag_population(i).real();
  }
  return pop;
}

void check_limits(Diagnostics& d, bool pure, bool hermitian_input) {
  if (pure) {
    if (d.norm_drift > kNormDriftLimit) d.flag(fmt::format("norm drift {:.3e}", d.norm_drift));
  } else {
    if (d.trace_drift > kTraceDriftLimit) d.flag(fmt::format("trace drift {:.3e}", d.trace_drift));
    if (hermitian_input && d.hermiticity_drift > kHermiticityLimit) {
      d.flag(fmt::format("hermiticity drift {:.3e}", d.hermiticity_drift));
    }
    if (hermitian_input && d.min_eigenvalue < kPositivityLimit) {
      d.flag(fmt::format("negative eigenvalue {:.3e}", d.min_eigenvalue));
    }
  }
  if (d.top_fock_population > kTopFockLimit) {
    d.flag(fmt::format("top Fock population {:.3e} exceeds {:.0e}", d.top_fock_population,
                       kTopFockLimit));
  }
}

}  // namespace

double recommended_step(const SystemParams& p, int steps_per_period) {
  if (steps_per_period < 1) throw std::invalid_argument("recommended_step: steps_per_period < 1");
  double period = std::numeric_limits<double>::infinity();
  if (p.delta != 0.0) period = 2.0 * std::numbers::pi / std::abs(p.delta);
  if (p.pulse.kind == PulseKind::sine_squared) period = std::min(period, std::numbers::pi / p.pulse.alpha);
  if (!std::isfinite(period)) period = 2.0 * std::numbers::pi / std::max(1.0, std::abs(p.omega));
  return period / steps_per_period;
}

void Diagnostics::flag(std::string reason) {
  flagged = true;
  reasons.push_back(std::move(reason));
}

void Diagnostics::merge(const Diagnostics& other) {
  norm_drift = std::max(norm_drift, other.norm_drift);
  trace_drift = std::max(trace_drift, other.trace_drift);
  hermiticity_drift = std::max(hermiticity_drift, other.hermiticity_drift);
  min_eigenvalue = std::min(min_eigenvalue, other.min_eigenvalue);
  top_fock_population = std::max(top_fock_population, other.top_fock_population);
  steps += other.steps;
  flagged = flagged || other.flagged;
  reasons.insert(reasons.end(), other.reasons.begin(), other.reasons.end());
}

EvolutionResult evolve_schrodinger(const EvolutionRequest& req) {
  check_request(req);
  if (req.lindblad) throw std::invalid_argument("evolve_schrodinger: collapse operators given");
  const auto* init = std::get_if<StateVector>(&req.initial);
  if (!init) throw std::invalid_argument("evolve_schrodinger: initial state must be a StateVector");
  if (!(init->layout() == req.hamiltonian.layout())) {
    throw std::invalid_argument("evolve_schrodinger: initial state layout mismatch");
  }
  if (std::abs(init->norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("evolve_schrodinger: initial state is not normalised");
  }

  MergedGenerator generator(req.hamiltonian, kMinusI, nullptr);
  Matrix out_buffer;
  auto rhs = [&](double t, const Vector& psi, Vector& out) {
    sparse_times_dense(generator.at(t), psi, out_buffer);
    out = out_buffer.col(0);
  };

  EvolutionResult res(req.initial);
  Vector psi = init->amplitudes();
  double t = 0.0;
  for (double ts : req.sample_times) {
    res.diagnostics.steps += advance(psi, t, ts, req.step, rhs);
    t = ts;
    const StateVector state(req.hamiltonian.layout(), psi);
    res.times.push_back(ts);
    res.diagnostics.norm_drift = std::max(res.diagnostics.norm_drift, std::abs(psi.norm() - 1.0));
    res.diagnostics.top_fock_population =
        std::max(res.diagnostics.top_fock_population,
                 top_fock_population(req, psi.cwiseAbs2().cast<Complex>()));
    for (const auto& obs : req.observables) res.series[obs.name].push_back(expectation(obs.op, state));
    if (req.snapshots != SnapshotMode::none) res.states.push_back(state);
  }
  check_limits(res.diagnostics, true, true);
  return res;
}

EvolutionResult evolve_lindblad(const EvolutionRequest& req) {
  check_request(req);
  const SpaceLayout& layout = req.hamiltonian.layout();
  DensityMatrix rho0 = std::holds_alternative<StateVector>(req.initial)
                           ? std::get<StateVector>(req.initial).projector()
                           : std::get<DensityMatrix>(req.initial);
  if (!(rho0.layout() == layout)) throw std::invalid_argument("evolve_lindblad: initial layout mismatch");
  const bool hermitian_input = rho0.hermiticity_error() <= 1e-12;

  // The fused form below needs a Hermitian H.
  for (double probe : {0.0, 0.5 * req.t_final, req.t_final}) {
    if (req.hamiltonian.at(probe).hermiticity_error() > 1e-10) {
      throw std::invalid_argument("evolve_lindblad: Hamiltonian is not Hermitian");
    }
  }

  std::vector<SparseMatrix> jumps;
  SparseMatrix loss(layout.total(), layout.total());
  if (req.lindblad) {
    for (const Operator& L : req.lindblad->operators()) {
      if (!(L.layout() == layout)) throw std::invalid_argument("evolve_lindblad: collapse operator layout mismatch");
      SparseMatrix s = to_sparse(L.matrix());
      if (s.nonZeros() == 0) continue;
      loss += SparseMatrix(SparseMatrix(s.adjoint()) * s);
      jumps.push_back(std::move(s));
    }
  }

  // M = -i H - K / 2 with K = sum L^dagger L, so that
  // d rho / dt = M rho + rho M^dagger + sum L rho L^dagger.
  const SparseMatrix half_loss = Complex(-0.5) * loss;
  MergedGenerator generator(req.hamiltonian, kMinusI, &half_loss);
  // L rho L^dagger = L (L rho^dagger)^dagger, so every product is sparse * dense.
  RowMajorMatrix z, rho_dag, lr, lr_dag;
  auto rhs = [&](double t, const RowMajorMatrix& rho, RowMajorMatrix& out) {
    const SparseMatrix& m = generator.at(t);
    sparse_times_rows(m, rho, z, false);
    if (hermitian_input) {
      out = z + z.adjoint();
    } else {
      rho_dag = rho.adjoint();
      sparse_times_rows(m, rho_dag, lr, false);
      out = z + lr.adjoint();
    }
    for (std::size_t j = 0; j < jumps.size(); ++j) {
      if (hermitian_input) {
        sparse_times_rows(jumps[j], rho, lr, false);
      } else {
        sparse_times_rows(jumps[j], rho_dag, lr, false);
      }
      lr_dag = lr.adjoint();
      sparse_times_rows(jumps[j], lr_dag, out, true);
    }
  };

  EvolutionResult res(req.initial);
  RowMajorMatrix rho = rho0.matrix();
  const Complex trace0 = rho.trace();
  double t = 0.0;
  for (double ts : req.sample_times) {
    res.diagnostics.steps += advance(rho, t, ts, req.step, rhs);
    t = ts;
    const DensityMatrix state(layout, Matrix(rho));
    res.times.push_back(ts);
    Diagnostics& d = res.diagnostics;
    d.trace_drift = std::max(d.trace_drift, std::abs(rho.trace() - trace0) / std::max(1.0, std::abs(trace0)));
    if (hermitian_input) {
      d.hermiticity_drift = std::max(d.hermiticity_drift, state.hermiticity_error());
      d.min_eigenvalue = std::min(d.min_eigenvalue, state.min_eigenvalue());
    }
    d.top_fock_population = std::max(d.top_fock_population, top_fock_population(req, rho.diagonal()));
    for (const auto& obs : req.observables) res.series[obs.name].push_back(expectation(obs.op, state));
    if (req.snapshots == SnapshotMode::full) {
      res.densities.push_back(state);
    } else if (req.snapshots == SnapshotMode::reduced) {
      res.densities.push_back(partial_trace(state, std::span<const std::size_t>(req.reduce_to)));
    }
  }
  check_limits(res.diagnostics, false, hermitian_input);
  return res;
}

EvolutionResult evolve(const EvolutionRequest& req) {
  if (req.lindblad || std::holds_alternative<DensityMatrix>(req.initial)) return evolve_lindblad(req);
  return evolve_schrodinger(req);
}

ConvergenceReport step_convergence_probe(const EvolutionRequest& req, int refinement,
                                         ConvergenceScore score, int levels) {
  if (refinement < 2) throw std::invalid_argument("step_convergence_probe: refinement must be >= 2");
  if (levels < 2) throw std::invalid_argument("step_convergence_probe: levels must be >= 2");
  if (!score) {
    score = [](const EvolutionResult& r) {
      std::vector<double> out;
      for (const auto& [name, values] : r.series) {
        for (const Complex& v : values) {
          out.push_back(v.real());
          out.push_back(v.imag());
        }
      }
      auto push_matrix = [&out](const auto& m) {
        for (Index i = 0; i < m.size(); ++i) {
          out.push_back(m.data()[i].real());
          out.push_back(m.data()[i].imag());
        }
      };
      if (!r.states.empty()) push_matrix(r.states.back().amplitudes());
      if (!r.densities.empty()) push_matrix(r.densities.back().matrix());
      return out;
    };
  }

  ConvergenceReport report;
  std::vector<std::vector<double>> scores;
  EvolutionRequest run = req;
  for (int level = 0; level < levels; ++level) {
    report.dts.push_back(run.step.dt_max);
    scores.push_back(score(evolve(run)));
    run.step.dt_max /= refinement;
  }
  for (std::size_t i = 0; i + 1 < scores.size(); ++i) {
    const auto& a = scores[i];
    const auto& b = scores[i + 1];
    if (a.size() != b.size()) throw std::logic_error("step_convergence_probe: score size changed");
    double dev = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) dev = std::max(dev, std::abs(a[k] - b[k]));
    report.deviations.push_back(dev);
  }
  if (report.deviations.size() >= 2 && report.deviations[1] > 0.0) {
    report.ratio = report.deviations[0] / report.deviations[1];
  }
  return report;
}

}  // namespace gatesim
