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

#include <gatesim/lab/scenario.hpp>
#include <gatesim/metrics.hpp>
#include <gatesim/parallel.hpp>

#include <fmt/format.h>
#include <json.hpp>

#include <Eigen/Core>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#ifndef GATESIM_VERSION
#define GATESIM_VERSION "unknown"
#endif

namespace gatesim::lab {

namespace {

using nlohmann::json;
constexpr double kPi = std::numbers::pi;
constexpr std::size_t kMaxReasons = 20;

const std::array<const char*, 4> kBranchColumns = {"ff", "fp", "pf", "pp"};

bool pure_params(const SystemParams& p) { return p.kappa == 0.0 && p.gamma == 0.0; }

int pick_steps(const ScenarioConfig& cfg, bool fine) {
  if (cfg.steps_per_period > 0) return cfg.steps_per_period;
  return fine ? kPureStepsPerPeriod : kStepsPerPeriod;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = i == n - 1 ? b : a + (b - a) * i / (n - 1);
  return out;
}

// Time and rate columns in the configured units.
struct Axis {
  UnitsMode mode;
  UnitContext ctx;

  std::string time_column() const { return mode == UnitsMode::physical ? "time_ns" : "time"; }
  double time(double t) const { return mode == UnitsMode::physical ? to_ns(t, ctx) : t; }
  std::string rate_column(const std::string& name) const {
    return mode == UnitsMode::physical ? name + "_mhz" : name;
  }
  double rate(double r) const { return mode == UnitsMode::physical ? to_mhz(r, ctx) : r; }
};

EvolutionRequest gate_request(const SystemParams& p, std::vector<double> times, int spp, SnapshotMode mode,
                              std::vector<Observable> observables = {}) {
  const double t_final = times.empty() ? 0.0 : times.back();
  return EvolutionRequest{
      .hamiltonian = squeezed_frame_hamiltonian(p),
      .initial = initial_state(p.n_fock),
      .lindblad = pure_params(p) ? std::nullopt : std::optional<LindbladSpec>(build_lindblad(p, p.layout())),
      .t_final = t_final,
      .sample_times = std::move(times),
      .observables = std::move(observables),
      .step = StepControl{.dt_max = recommended_step(p, spp)},
      .snapshots = mode,
      .reduce_to = {kQutrit1, kQutrit2},
      .fock_factor = kCavity,
  };
}

json design_json(const GateDesign& d, const UnitContext& ctx) {
  json j;
  j["label"] = d.label();
  if (const auto* u = std::get_if<UnshapedGate>(&d.variant)) {
    j["variant"] = "unshaped";
    j["k1"] = u->k1;
    j["k2"] = u->k2;
    j["k3"] = u->k3;
  } else {
    j["variant"] = "shaped";
    j["order"] = std::get<ShapedGate>(d.variant).order;
  }
  j["phi"] = d.phi;
  j["delta"] = d.delta;
  j["omega"] = d.omega;
  j["alpha"] = d.alpha;
  j["tau"] = d.tau;
  j["r_p"] = d.r_p;
  j["g_m"] = d.g_m;
  j["warnings"] = physical_warnings(d, ctx);
  j["physical"] = {{"g_mhz", ctx.g_mhz},
                   {"delta_mhz", to_mhz(d.delta, ctx)},
                   {"omega_mhz", to_mhz(d.omega, ctx)},
                   {"alpha_mhz", to_mhz(d.alpha, ctx)},
                   {"tau_ns", to_ns(d.tau, ctx)}};
  return j;
}

json diagnostics_json(const Diagnostics& d) {
  // Many runs repeat the same reasons; keep the first few distinct ones.
  std::vector<std::string> reasons;
  std::set<std::string> seen;
  for (const auto& r : d.reasons) {
    if (seen.insert(r).second && reasons.size() < kMaxReasons) reasons.push_back(r);
  }
  return json{{"flagged", d.flagged},
              {"reasons", reasons},
              {"reason_count", d.reasons.size()},
              {"norm_drift", d.norm_drift},
              {"trace_drift", d.trace_drift},
              {"hermiticity_drift", d.hermiticity_drift},
              {"min_eigenvalue", d.min_eigenvalue},
              {"top_fock_population", d.top_fock_population},
              {"steps", d.steps}};
}

ScenarioOutput finish(std::string name, CsvTable table, std::vector<GateDesign> designs, Diagnostics diag,
                      const ScenarioConfig& cfg, int spp, json extra,
                      std::chrono::steady_clock::time_point start) {
  json m;
  m["scenario"] = name;
  m["version"] = GATESIM_VERSION;
  m["eigen_version"] =
      fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION);
  m["config"] = json::parse(config_to_json(cfg));
  m["steps_per_period"] = spp;
  m["n_fock"] = cfg.n_fock;
  m["columns"] = table.columns();
  m["rows"] = table.rows().size();
  json ds = json::array();
  for (const auto& d : designs) ds.push_back(design_json(d, cfg.unit_context));
  m["designs"] = ds;
  m["diagnostics"] = diagnostics_json(diag);
  if (!extra.is_null()) m["results"] = extra;
  m["wall_clock_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return ScenarioOutput{std::move(name), std::move(table), m.dump(2) + "\n", std::move(designs), std::move(diag)};
}

GateDesign solve_config_design(const ScenarioConfig& cfg) { return cfg.design.solve(); }

// Fidelity, average fidelity, populations and phases on an s = t / tau grid.
struct GateTrace {
  std::vector<double> fidelity;
  std::vector<double> average;
  PopulationPhaseReport report;
  std::vector<double> photons;
  std::vector<PhasePoint> field;
  Diagnostics diagnostics;
};

GateTrace trace_gate(const GateDesign& d, const ScenarioConfig& cfg, const std::vector<double>& times, int spp,
                     bool with_average) {
  const SystemParams p = d.system_params(cfg.n_fock);
  EvolutionRequest req = gate_request(p, times, spp, SnapshotMode::full, standard_observables(cfg.n_fock));
  const EvolutionResult res = evolve_schrodinger(req);
  GateTrace out;
  out.fidelity = state_fidelity(res, d);
  out.report = populations_and_phases(res);
  out.photons = photon_number(res);
  out.field = phase_space_trajectory(res);
  out.diagnostics = res.diagnostics;
  if (with_average) {
    const AverageFidelity avg =
        average_fidelity(unitary_channel(req.hamiltonian, times, req.step, cfg.workers), d, cfg.workers);
    out.average = avg.values;
    out.diagnostics.merge(avg.diagnostics);
  }
  return out;
}

ScenarioOutput run_fig2(const ScenarioConfig& cfg, std::chrono::steady_clock::time_point start) {
  const GateDesign d = solve_config_design(cfg);
  const int spp = pick_steps(cfg, true);
  const Axis axis{cfg.units, cfg.unit_context};
  const std::vector<double> times = linspace(0.0, d.tau, cfg.samples);
  const GateTrace tr = trace_gate(d, cfg, times, spp, true);

  std::vector<std::string> cols = {axis.time_column()};
  for (const char* b : kBranchColumns) cols.push_back(fmt::format("pop_{}", b));
  cols.push_back("fidelity");
  cols.push_back("avg_fidelity");
  for (const char* b : kBranchColumns) cols.push_back(fmt::format("phase_{}", b));
  CsvTable table(cols);
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::vector<Cell> row = {axis.time(times[i])};
    for (int s = 0; s < 4; ++s) row.push_back(tr.report.populations[s][i]);
    row.push_back(tr.fidelity[i]);
    row.push_back(tr.average[i]);
    for (int s = 0; s < 4; ++s) row.push_back(tr.report.phases[s][i]);
    table.add_row(std::move(row));
  }
  json extra = {{"fidelity_tau", tr.fidelity.back()},
                {"avg_fidelity_tau", tr.average.back()},
                {"phase_pp_tau", tr.report.phases[3].back()}};
  return finish("fig2", std::move(table), {d}, tr.diagnostics, cfg, spp, extra, start);
}

ScenarioOutput run_fig3(const ScenarioConfig& cfg, bool trajectories, std::chrono::steady_clock::time_point start) {
  const std::vector<GateDesign> designs = comparison_designs();
  const int spp = pick_steps(cfg, true);
  const std::vector<double> s_grid = linspace(0.0, 1.0, cfg.samples);
  const bool branch = trajectories && cfg.trajectory_branch == "++";

  std::vector<std::vector<double>> photons(designs.size());
  std::vector<std::vector<PhasePoint>> fields(designs.size());
  std::vector<Diagnostics> diags(designs.size());
  parallel_for(
      designs.size(),
      [&](std::size_t i) {
        const GateDesign& d = designs[i];
        const SystemParams p = d.system_params(cfg.n_fock);
        std::vector<double> times;
        for (double s : s_grid) times.push_back(s * d.tau);
        EvolutionRequest req = gate_request(p, times, spp, SnapshotMode::none, standard_observables(cfg.n_fock));
        if (branch) req.initial = branch_initial_state(3, cfg.n_fock);
        const EvolutionResult res = evolve_schrodinger(req);
        photons[i] = photon_number(res);
        fields[i] = phase_space_trajectory(res);
        diags[i] = res.diagnostics;
      },
      cfg.workers);

  std::vector<std::string> cols = {"t_over_tau"};
  for (const auto& d : designs) {
    if (trajectories) {
      cols.push_back("x_" + design_tag(d));
      cols.push_back("p_" + design_tag(d));
    } else {
      cols.push_back("photon_number_" + design_tag(d));
    }
  }
  CsvTable table(cols);
  for (std::size_t r = 0; r < s_grid.size(); ++r) {
    std::vector<Cell> row = {s_grid[r]};
    for (std::size_t i = 0; i < designs.size(); ++i) {
      if (trajectories) {
        row.push_back(fields[i][r].x);
        row.push_back(fields[i][r].p);
      } else {
        row.push_back(photons[i][r]);
      }
    }
    table.add_row(std::move(row));
  }
  Diagnostics diag;
  json extra = json::object();
  for (std::size_t i = 0; i < designs.size(); ++i) {
    diag.merge(diags[i]);
    const std::string tag = design_tag(designs[i]);
    if (trajectories) {
      double radius = 0.0;
      for (const auto& pt : fields[i]) radius = std::max(radius, std::hypot(pt.x, pt.p));
      extra[tag] = {{"max_radius", radius}, {"closure", std::hypot(fields[i].back().x, fields[i].back().p)}};
    } else {
      extra[tag] = {{"max_photon_number", *std::max_element(photons[i].begin(), photons[i].end())}};
    }
  }
  if (trajectories) extra["branch"] = cfg.trajectory_branch;
  return finish(trajectories ? "fig3b" : "fig3a", std::move(table), designs, diag, cfg, spp, extra, start);
}

ScenarioOutput run_fig4(const ScenarioConfig& cfg, std::chrono::steady_clock::time_point start) {
  std::vector<GateDesign> designs;
  for (const auto& d : comparison_designs()) {
    const std::string tag = design_tag(d);
    if (tag == "k1" || tag == "k19") designs.push_back(d);
  }
  const int spp = pick_steps(cfg, true);
  const std::vector<double> s_grid = linspace(0.0, 1.0, cfg.samples);
  std::vector<GateTrace> traces;
  for (const auto& d : designs) {
    std::vector<double> times;
    for (double s : s_grid) times.push_back(s * d.tau);
    traces.push_back(trace_gate(d, cfg, times, spp, true));
  }
  std::vector<std::string> cols = {"t_over_tau"};
  for (const auto& d : designs) {
    const std::string tag = design_tag(d);
    cols.push_back("fidelity_" + tag);
    cols.push_back("avg_fidelity_" + tag);
    for (const char* b : kBranchColumns) cols.push_back(fmt::format("pop_{}_{}", b, tag));
    for (const char* b : kBranchColumns) cols.push_back(fmt::format("phase_{}_{}", b, tag));
  }
  CsvTable table(cols);
  for (std::size_t r = 0; r < s_grid.size(); ++r) {
    std::vector<Cell> row = {s_grid[r]};
    for (const auto& tr : traces) {
      row.push_back(tr.fidelity[r]);
      row.push_back(tr.average[r]);
      for (int s = 0; s < 4; ++s) row.push_back(tr.report.populations[s][r]);
      for (int s = 0; s < 4; ++s) row.push_back(tr.report.phases[s][r]);
    }
    table.add_row(std::move(row));
  }
  Diagnostics diag;
  json extra = json::object();
  for (std::size_t i = 0; i < designs.size(); ++i) {
    diag.merge(traces[i].diagnostics);
    extra[design_tag(designs[i])] = {{"fidelity_tau", traces[i].fidelity.back()},
                                     {"avg_fidelity_tau", traces[i].average.back()},
                                     {"phase_pp_tau", traces[i].report.phases[3].back()}};
  }
  return finish("fig4", std::move(table), designs, diag, cfg, spp, extra, start);
}

std::vector<GateDesign> robustness_designs() {
  std::vector<GateDesign> out;
  for (const auto& d : comparison_designs()) {
    if (design_tag(d) != "k4") out.push_back(d);
  }
  return out;
}

ScenarioOutput run_fig5(const ScenarioConfig& cfg, std::chrono::steady_clock::time_point start) {
  const SweepSpec sweep = *cfg.sweep;
  const ErrorKind kind = parse_error_kind(sweep.parameter);
  const std::vector<GateDesign> designs = robustness_designs();
  const std::vector<double> grid = sweep.grid();
  const int spp = pick_steps(cfg, false);

  std::vector<GateRun> runs(grid.size() * designs.size());
  parallel_for(
      runs.size(),
      [&](std::size_t job) {
        const GateDesign& d = designs[job % designs.size()];
        const PerturbedRun pr = apply_error(d, kind, grid[job / designs.size()], cfg.n_fock, cfg.kappa, cfg.gamma);
        runs[job] = simulate_gate(d, pr.params, pr.t_measure, spp);
      },
      cfg.workers);

  std::vector<std::string> cols = {sweep.parameter + "_rel"};
  for (const auto& d : designs) cols.push_back("fidelity_" + design_tag(d));
  CsvTable table(cols);
  Diagnostics diag;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::vector<Cell> row = {grid[g]};
    for (std::size_t i = 0; i < designs.size(); ++i) {
      const GateRun& r = runs[g * designs.size() + i];
      row.push_back(r.fidelity);
      diag.merge(r.diagnostics);
    }
    table.add_row(std::move(row));
  }
  return finish(scenario_name(cfg.scenario), std::move(table), designs, diag, cfg, spp, json(), start);
}

ScenarioOutput run_fig6(const ScenarioConfig& cfg, std::chrono::steady_clock::time_point start) {
  const std::vector<GateDesign> designs = robustness_designs();
  const std::vector<double> grid = cfg.sweep->grid();
  const int spp = pick_steps(cfg, false);
  const Axis axis{cfg.units, cfg.unit_context};

  // job = (grid index, axis 0 kappa / 1 gamma, design)
  const std::size_t per_point = 2 * designs.size();
  std::vector<GateRun> runs(grid.size() * per_point);
  parallel_for(
      runs.size(),
      [&](std::size_t job) {
        const double rate = grid[job / per_point];
        const bool gamma_axis = (job % per_point) >= designs.size();
        const GateDesign& d = designs[job % designs.size()];
        const SystemParams p = d.system_params(cfg.n_fock, gamma_axis ? 0.0 : rate, gamma_axis ? rate : 0.0);
        runs[job] = simulate_gate(d, p, d.tau, spp);
      },
      cfg.workers);

  std::vector<std::string> cols = {axis.rate_column("rate")};
  for (const char* which : {"kappa", "gamma"}) {
    for (const auto& d : designs) cols.push_back(fmt::format("fidelity_{}_{}", which, design_tag(d)));
  }
  CsvTable table(cols);
  Diagnostics diag;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::vector<Cell> row = {axis.rate(grid[g])};
    for (std::size_t k = 0; k < per_point; ++k) {
      row.push_back(runs[g * per_point + k].fidelity);
      diag.merge(runs[g * per_point + k].diagnostics);
    }
    table.add_row(std::move(row));
  }
  return finish("fig6", std::move(table), designs, diag, cfg, spp, json(), start);
}

ScenarioOutput run_fig8(const ScenarioConfig& cfg, std::chrono::steady_clock::time_point start) {
  const double t_final = cfg.validity.periods * 2.0 * kPi / std::exp(2.5);
  const int spp = pick_steps(cfg, true);
  const Axis axis{cfg.units, cfg.unit_context};
  std::vector<ValidityReport> reports(cfg.validity.r_p.size());
  parallel_for(
      reports.size(),
      [&](std::size_t i) {
        SystemParams p;
        p.r_p = cfg.validity.r_p[i];
        p.delta = std::exp(p.r_p);
        p.omega = -p.delta / 2.0;
        p.n_fock = cfg.n_fock;
        reports[i] = rabi_validity_fidelity(p, t_final, static_cast<std::size_t>(cfg.samples),
                                            StepControl{.dt_max = recommended_step(p, spp)});
      },
      cfg.workers);
  std::vector<std::string> cols = {axis.time_column()};
  for (double r : cfg.validity.r_p) cols.push_back("fidelity_rp" + format_number(r));
  CsvTable table(cols);
  Diagnostics diag;
  for (const auto& rep : reports) diag.merge(rep.diagnostics);
  for (std::size_t k = 0; k < reports.front().times.size(); ++k) {
    std::vector<Cell> row = {axis.time(reports.front().times[k])};
    for (const auto& rep : reports) row.push_back(rep.fidelity[k]);
    table.add_row(std::move(row));
  }
  json extra = json::object();
  for (std::size_t i = 0; i < reports.size(); ++i) {
    extra["rp" + format_number(cfg.validity.r_p[i])] = {
        {"min_fidelity", *std::min_element(reports[i].fidelity.begin(), reports[i].fidelity.end())}};
  }
  extra["t_final"] = t_final;
  return finish("fig8", std::move(table), {}, diag, cfg, spp, extra, start);
}

ScenarioOutput run_custom(const ScenarioConfig& cfg, std::chrono::steady_clock::time_point start) {
  const GateDesign d = solve_config_design(cfg);
  const SystemParams p = d.system_params(cfg.n_fock, cfg.kappa, cfg.gamma);
  const bool pure = pure_params(p);
  const int spp = pick_steps(cfg, pure);
  const Axis axis{cfg.units, cfg.unit_context};
  const std::vector<double> times = linspace(0.0, d.tau, cfg.samples);
  EvolutionRequest req = gate_request(p, times, spp, pure ? SnapshotMode::full : SnapshotMode::reduced,
                                      standard_observables(cfg.n_fock));
  const EvolutionResult res = evolve(req);
  const std::vector<double> fid = state_fidelity(res, d);
  const std::vector<double> photons = photon_number(res);
  const std::vector<PhasePoint> field = phase_space_trajectory(res);

  std::vector<std::string> cols = {axis.time_column(), "fidelity", "photon_number", "field_x", "field_p"};
  std::optional<PopulationPhaseReport> report;
  if (pure) {
    report = populations_and_phases(res);
    for (const char* b : kBranchColumns) cols.push_back(fmt::format("pop_{}", b));
    for (const char* b : kBranchColumns) cols.push_back(fmt::format("phase_{}", b));
  }
  CsvTable table(cols);
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::vector<Cell> row = {axis.time(times[i]), fid[i], photons[i], field[i].x, field[i].p};
    if (report) {
      for (int s = 0; s < 4; ++s) row.push_back(report->populations[s][i]);
      for (int s = 0; s < 4; ++s) row.push_back(report->phases[s][i]);
    }
    table.add_row(std::move(row));
  }
  json extra = {{"fidelity_tau", fid.back()}};
  return finish("custom", std::move(table), {d}, res.diagnostics, cfg, spp, extra, start);
}

}  // namespace

ErrorKind parse_error_kind(std::string_view name) {
  if (name == "tau") return ErrorKind::tau;
  if (name == "delta") return ErrorKind::delta;
  if (name == "omega") return ErrorKind::omega;
  if (name == "g_m") return ErrorKind::g_m;
  throw ConfigError("unknown control error '" + std::string(name) + "' (expected tau, delta, omega or g_m)");
}

PerturbedRun apply_error(const GateDesign& design, ErrorKind which, double rel, Index n_fock, double kappa,
                         double gamma) {
  if (!std::isfinite(rel) || rel <= -1.0) throw std::invalid_argument("apply_error: rel must be > -1");
  if (which == ErrorKind::delta && std::abs(rel) >= 1.0) {
    throw std::invalid_argument("apply_error: |rel| < 1 required for delta");
  }
  PerturbedRun out{design.system_params(n_fock, kappa, gamma), design.tau};
  switch (which) {
    case ErrorKind::tau: out.t_measure = design.tau * (1.0 + rel); break;
    case ErrorKind::delta: out.params.delta = design.delta * (1.0 + rel); break;
    case ErrorKind::omega: out.params.omega = design.omega * (1.0 + rel); break;
    case ErrorKind::g_m: out.params.g_m = design.g_m * (1.0 + rel); break;
  }
  return out;
}

GateRun simulate_gate(const GateDesign& design, const SystemParams& params, double t, int steps_per_period) {
  const bool pure = pure_params(params);
  const EvolutionRequest req =
      gate_request(params, {t}, steps_per_period, pure ? SnapshotMode::full : SnapshotMode::reduced);
  const EvolutionResult res = evolve(req);
  return GateRun{state_fidelity(res, design).back(), res.diagnostics};
}

std::vector<GateDesign> comparison_designs() {
  return {solve_unshaped(1, 0, 0, kPi, 2.5), solve_shaped(1, 3.28), solve_shaped(4, 3.78), solve_shaped(19, 4.49)};
}

std::string design_tag(const GateDesign& design) {
  if (const auto* s = std::get_if<ShapedGate>(&design.variant)) return fmt::format("k{}", s->order);
  return "unshaped";
}

std::array<SurfaceSetting, 2> surface_settings() {
  return {SurfaceSetting{"S.I", 50.0, -139.01}, SurfaceSetting{"S.II", 50.5, -140.4}};
}

GateRun surface_point(const GateDesign& nominal, const SurfaceSetting& setting, double t_ns, double delta_mhz,
                      const ScenarioConfig& cfg) {
  const UnitContext& ctx = cfg.unit_context;
  SystemParams p = nominal.system_params(cfg.n_fock, from_mhz(cfg.surface.kappa_mhz, ctx),
                                         from_mhz(cfg.surface.gamma_mhz, ctx));
  p.g_m = from_mhz(setting.g_m_mhz, ctx);
  p.omega = from_mhz(setting.omega_mhz, ctx);
  p.delta = from_mhz(delta_mhz, ctx);
  return simulate_gate(nominal, p, from_ns(t_ns, ctx), pick_steps(cfg, false));
}

ScenarioOutput run_fig7_surface(const ScenarioConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const GateDesign nominal = solve_config_design(cfg);
  if (!nominal.shaped()) throw ConfigError("fig7: the surface needs a shaped design");
  const UnitContext& ctx = cfg.unit_context;
  const int spp = pick_steps(cfg, false);
  const auto settings = surface_settings();
  const double span = cfg.surface.rel_span;
  const std::vector<double> t_grid = linspace(nominal.tau * (1.0 - span), nominal.tau * (1.0 + span), cfg.surface.t_points);
  const std::vector<double> d_grid =
      linspace(nominal.delta * (1.0 - span), nominal.delta * (1.0 + span), cfg.surface.delta_points);

  // One Lindblad run per (surface, delta), sampled along the time axis.
  std::vector<std::vector<double>> fid(settings.size() * d_grid.size());
  std::vector<Diagnostics> diags(fid.size());
  parallel_for(
      fid.size(),
      [&](std::size_t job) {
        const SurfaceSetting& s = settings[job / d_grid.size()];
        SystemParams p = nominal.system_params(cfg.n_fock, from_mhz(cfg.surface.kappa_mhz, ctx),
                                               from_mhz(cfg.surface.gamma_mhz, ctx));
        p.g_m = from_mhz(s.g_m_mhz, ctx);
        p.omega = from_mhz(s.omega_mhz, ctx);
        p.delta = d_grid[job % d_grid.size()];
        const EvolutionResult res =
            evolve(gate_request(p, t_grid, spp, pure_params(p) ? SnapshotMode::full : SnapshotMode::reduced));
        fid[job] = state_fidelity(res, nominal);
        diags[job] = res.diagnostics;
      },
      cfg.workers);

  CsvTable table({"surface", "time_ns", "delta_mhz", "fidelity"});
  Diagnostics diag;
  for (std::size_t si = 0; si < settings.size(); ++si) {
    for (std::size_t di = 0; di < d_grid.size(); ++di) {
      const std::size_t job = si * d_grid.size() + di;
      diag.merge(diags[job]);
      for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
        table.add_row({settings[si].tag, to_ns(t_grid[ti], ctx), to_mhz(d_grid[di], ctx), fid[job][ti]});
      }
    }
  }

  // The two quoted operating points, evaluated directly.
  json extra = json::object();
  const struct {
    const SurfaceSetting& setting;
    double t_ns;
    double delta_mhz;
  } points[] = {{settings[0], 3.6, 556.05}, {settings[1], 3.69, 569.95}};
  for (const auto& pt : points) {
    const GateRun r = surface_point(nominal, pt.setting, pt.t_ns, pt.delta_mhz, cfg);
    diag.merge(r.diagnostics);
    extra[pt.setting.tag] = {{"time_ns", pt.t_ns}, {"delta_mhz", pt.delta_mhz}, {"fidelity", r.fidelity}};
  }
  return finish("fig7", std::move(table), {nominal}, diag, cfg, spp, extra, start);
}

ScenarioOutput run_sweep(const ScenarioConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  if (!cfg.sweep) throw ConfigError("sweep: no sweep specified");
  const SweepSpec& sweep = *cfg.sweep;
  const GateDesign d = solve_config_design(cfg);
  const std::vector<double> grid = sweep.grid();
  const bool rate = sweep.parameter == "kappa" || sweep.parameter == "gamma";
  if (sweep.parameter == "rate") throw ConfigError("sweep: 'rate' is only valid for fig6");
  const int spp = pick_steps(cfg, false);
  const Axis axis{cfg.units, cfg.unit_context};

  std::vector<GateRun> runs(grid.size());
  parallel_for(
      grid.size(),
      [&](std::size_t i) {
        if (rate) {
          const SystemParams p = d.system_params(cfg.n_fock, sweep.parameter == "kappa" ? grid[i] : cfg.kappa,
                                                 sweep.parameter == "gamma" ? grid[i] : cfg.gamma);
          runs[i] = simulate_gate(d, p, d.tau, spp);
        } else {
          const PerturbedRun pr =
              apply_error(d, parse_error_kind(sweep.parameter), grid[i], cfg.n_fock, cfg.kappa, cfg.gamma);
          runs[i] = simulate_gate(d, pr.params, pr.t_measure, spp);
        }
      },
      cfg.workers);

  CsvTable table({rate ? axis.rate_column(sweep.parameter) : sweep.parameter + "_rel", "fidelity"});
  Diagnostics diag;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    table.add_row({rate ? axis.rate(grid[i]) : grid[i], runs[i].fidelity});
    diag.merge(runs[i].diagnostics);
  }
  return finish("sweep_" + sweep.parameter, std::move(table), {d}, diag, cfg, spp, json(), start);
}

ScenarioOutput run_convergence(const ScenarioConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  GateDesign d;
  switch (cfg.scenario) {
    case ScenarioId::fig2:
    case ScenarioId::custom:
    case ScenarioId::fig7: d = solve_config_design(cfg); break;
    case ScenarioId::fig4: d = solve_shaped(19, 4.49); break;
    default: d = comparison_designs().front(); break;
  }
  const double kappa = cfg.scenario == ScenarioId::custom ? cfg.kappa : 0.0;
  const double gamma = cfg.scenario == ScenarioId::custom ? cfg.gamma : 0.0;
  const SystemParams p = d.system_params(cfg.n_fock, kappa, gamma);
  const bool pure = pure_params(p);
  const int spp = pick_steps(cfg, pure);
  const std::vector<double> times = linspace(0.0, d.tau, cfg.samples);
  const EvolutionRequest req = gate_request(p, times, spp, pure ? SnapshotMode::full : SnapshotMode::reduced);
  auto score = [&](const EvolutionResult& r) { return state_fidelity(r, d); };
  const ConvergenceReport rep = step_convergence_probe(req, 2, score, 3);

  CsvTable table({"kind", "level", "dt", "n_fock", "deviation"});
  for (std::size_t i = 0; i < rep.deviations.size(); ++i) {
    table.add_row({std::string("step"), static_cast<double>(i), rep.dts[i], static_cast<double>(cfg.n_fock),
                   rep.deviations[i]});
  }
  const GateRun base = simulate_gate(d, p, d.tau, spp);
  SystemParams wide = p;
  wide.n_fock = 2 * cfg.n_fock;
  const GateRun big = simulate_gate(d, wide, d.tau, spp);
  table.add_row({std::string("fock"), 0.0, req.step.dt_max, static_cast<double>(wide.n_fock),
                 std::abs(big.fidelity - base.fidelity)});

  Diagnostics diag = base.diagnostics;
  diag.merge(big.diagnostics);
  json extra = {{"step_ratio", rep.ratio ? json(*rep.ratio) : json()},
                {"fidelity_tau", base.fidelity},
                {"fidelity_tau_wide_fock", big.fidelity}};
  return finish(scenario_name(cfg.scenario) + "_convergence", std::move(table), {d}, diag, cfg, spp, extra, start);
}

ScenarioOutput run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  switch (cfg.scenario) {
    case ScenarioId::fig2: return run_fig2(cfg, start);
    case ScenarioId::fig3a: return run_fig3(cfg, false, start);
    case ScenarioId::fig3b: return run_fig3(cfg, true, start);
    case ScenarioId::fig4: return run_fig4(cfg, start);
    case ScenarioId::fig5a:
    case ScenarioId::fig5b:
    case ScenarioId::fig5c:
    case ScenarioId::fig5d: return run_fig5(cfg, start);
    case ScenarioId::fig6: return run_fig6(cfg, start);
    case ScenarioId::fig7: return run_fig7_surface(cfg);
    case ScenarioId::fig8: return run_fig8(cfg, start);
    case ScenarioId::custom: return cfg.sweep ? run_sweep(cfg) : run_custom(cfg, start);
  }
  throw ConfigError("unhandled scenario");
}

std::filesystem::path resolve_output_dir(const ScenarioConfig& cfg) {
  if (const char* env = std::getenv("GATESIM_OUT"); env && *env) return env;
  return cfg.output_dir;
}

void write_outputs(const ScenarioOutput& out, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  out.table.write(dir / (out.name + ".csv"));
  std::ofstream m(dir / (out.name + ".manifest.json"), std::ios::binary);
  if (!m) throw std::runtime_error("cannot write manifest in '" + dir.string() + "'");
  m << out.manifest;
}

std::vector<GateDesign> load_manifest_designs(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw ConfigError("cannot read manifest '" + manifest.string() + "'");
  json m;
  try {
    m = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("manifest is not valid JSON: ") + e.what());
  }
  std::vector<GateDesign> out;
  for (const auto& j : m.at("designs")) {
    GateDesign d;
    if (j.at("variant") == "shaped") {
      d.variant = ShapedGate{j.at("order").get<int>()};
    } else {
      d.variant = UnshapedGate{j.at("k1").get<int>(), j.at("k2").get<int>(), j.at("k3").get<int>()};
    }
    d.phi = j.at("phi").get<double>();
    d.delta = j.at("delta").get<double>();
    d.omega = j.at("omega").get<double>();
    d.alpha = j.at("alpha").get<double>();
    d.tau = j.at("tau").get<double>();
    d.r_p = j.at("r_p").get<double>();
    d.g_m = j.at("g_m").get<double>();
    d.validate();
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace gatesim::lab
