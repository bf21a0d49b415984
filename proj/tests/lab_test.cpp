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

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace gatesim;
using namespace gatesim::lab;

namespace {

constexpr double kPi = std::numbers::pi;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("gatesim_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

ScenarioConfig small_custom() {
  ScenarioConfig cfg = default_config(ScenarioId::custom);
  cfg.n_fock = 8;
  cfg.samples = 11;
  cfg.design.r_p = 1.0;
  cfg.workers = 2;
  return cfg;
}

}  // namespace

TEST_SUITE("lab") {

TEST_CASE("unit conversions round-trip") {
  const UnitContext ctx{50.0};
  for (double x : {1e-3, 0.7, 12.18, 3000.0}) {
    CHECK(std::abs(from_mhz(to_mhz(x, ctx), ctx) - x) <= 1e-12 * x);
    CHECK(std::abs(from_ns(to_ns(x, ctx), ctx) - x) <= 1e-12 * x);
    CHECK(convert_units(x, Unit::natural, Unit::natural, ctx) == x);
  }
  CHECK(to_mhz(1.0, ctx) == doctest::Approx(50.0));
  CHECK(to_ns(2.0 * kPi, ctx) == doctest::Approx(20.0));
  CHECK_THROWS_AS(convert_units(1.0, Unit::mhz, Unit::ns, ctx), std::invalid_argument);
  CHECK_THROWS_AS(parse_unit("GHz"), std::invalid_argument);
  CHECK(parse_unit("mhz") == Unit::mhz);
  CHECK(parse_unit("NS") == Unit::ns);
}

TEST_CASE("shaped k = 1 design in physical units") {
  const GateDesign d = solve_shaped(1, 2.5);
  CHECK(std::abs(to_ns(d.tau) - 3.597) < 1e-3);
  CHECK(std::abs(to_mhz(d.delta) - 556.05) < 0.5);
  CHECK_FALSE(gate_time_discrepancy(d).has_value());
}

TEST_CASE("the quoted unshaped gate time is flagged with the computed value") {
  const GateDesign d = solve_unshaped(1, 0, 0, kPi, 2.5);
  const auto disc = gate_time_discrepancy(d, UnitContext{50.0});
  REQUIRE(disc.has_value());
  CHECK(disc->quoted == doctest::Approx(0.16));
  CHECK(std::abs(disc->computed - 1000.0 / (50.0 * std::exp(2.5))) < 1e-9);
  CHECK_FALSE(gate_time_discrepancy(d, UnitContext{40.0}).has_value());
  bool found = false;
  for (const auto& w : physical_warnings(d)) found |= w.find("0.16 ns") != std::string::npos;
  CHECK(found);
}

TEST_CASE("CSV formatting is fixed") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(1e-20) == "1e-20");
  CsvTable t({"a", "tag"});
  t.add_row({1.5, std::string("x")});
  t.add_row({-2.0, std::string("y")});
  CHECK(t.to_string() == "a,tag\n1.5,x\n-2,y\n");
  CHECK_THROWS_AS(t.add_row({1.0}), std::invalid_argument);
  CHECK(t.numeric_column("a") == std::vector<double>{1.5, -2.0});
  CHECK_THROWS_AS(t.numeric_column("tag"), std::out_of_range);
  CHECK_THROWS_AS(t.numeric_column("b"), std::out_of_range);
}

TEST_CASE("config parsing is strict") {
  const ScenarioConfig cfg = parse_config(R"({"scenario": "fig5c", "n_fock": 12,
      "sweep": {"parameter": "omega", "start": -0.1, "stop": 0.1, "count": 5}})");
  CHECK(cfg.scenario == ScenarioId::fig5c);
  CHECK(cfg.n_fock == 12);
  CHECK(cfg.sweep->count == 5);
  CHECK_THROWS_AS(parse_config(R"({"scenario": "fig2", "n_fok": 12})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"scenario": "fig9"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"n_fock": 12})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"scenario": "fig2", "n_fock": "12"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"scenario": "fig5a", "sweep": {"parameter": "tau", "count": 1}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"scenario": "fig5a", "sweep": {"parameter": "omgea"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"scenario": "custom", "design": {"variant": "shaped", "ordr": 2}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
}

TEST_CASE("config survives a JSON round trip") {
  ScenarioConfig cfg = default_config(ScenarioId::fig7);
  cfg.n_fock = 11;
  cfg.surface.t_points = 5;
  const ScenarioConfig back = parse_config(config_to_json(cfg));
  CHECK(back.scenario == ScenarioId::fig7);
  CHECK(back.n_fock == 11);
  CHECK(back.surface.t_points == 5);
  CHECK(back.units == UnitsMode::physical);
  CHECK(config_to_json(back) == config_to_json(cfg));
}

TEST_CASE("scenario defaults cover the plotted ranges") {
  for (ScenarioId id : {ScenarioId::fig5a, ScenarioId::fig5b, ScenarioId::fig5c, ScenarioId::fig5d}) {
    const ScenarioConfig cfg = default_config(id);
    REQUIRE(cfg.sweep.has_value());
    CHECK(cfg.sweep->count == 41);
    CHECK(cfg.sweep->start == -0.1);
    CHECK(cfg.sweep->stop == 0.1);
  }
  const ScenarioConfig f6 = default_config(ScenarioId::fig6);
  CHECK(f6.sweep->parameter == "rate");
  CHECK(f6.sweep->start == 0.0);
  CHECK(f6.sweep->stop == 0.1);
  for (ScenarioId id : all_scenarios()) CHECK(parse_scenario(scenario_name(id)) == id);
}

TEST_CASE("range strings") {
  const SweepSpec s = parse_range("delta", "-0.05:0.05:3");
  CHECK(s.grid() == std::vector<double>{-0.05, 0.0, 0.05});
  CHECK_THROWS_AS(parse_range("delta", "0:1"), ConfigError);
  CHECK_THROWS_AS(parse_range("delta", "0:x:3"), ConfigError);
  CHECK_THROWS_AS(parse_range("delta", "0:1:1"), ConfigError);
  CHECK_THROWS_AS(parse_range("delta", "0:inf:3"), ConfigError);
}

TEST_CASE("control errors") {
  const GateDesign d = solve_unshaped(1, 0, 0, kPi, 1.0);
  const PerturbedRun zero = apply_error(d, ErrorKind::omega, 0.0, 8);
  CHECK(zero.params.omega == d.omega);
  CHECK(zero.t_measure == d.tau);

  const PerturbedRun t = apply_error(d, ErrorKind::tau, 0.05, 8);
  CHECK(t.t_measure == doctest::Approx(1.05 * d.tau));
  CHECK(t.params.delta == d.delta);
  CHECK(t.params.omega == d.omega);

  const PerturbedRun g = apply_error(d, ErrorKind::g_m, -0.02, 8);
  CHECK(g.params.g_m == doctest::Approx(0.98));
  CHECK(g.t_measure == d.tau);
  CHECK_THROWS_AS(apply_error(d, ErrorKind::delta, -1.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(parse_error_kind("phase"), ConfigError);

  // rel = 0 is the unperturbed run.
  const GateRun a = simulate_gate(d, d.system_params(8), d.tau, 100);
  const GateRun b = simulate_gate(d, zero.params, zero.t_measure, 100);
  CHECK(a.fidelity == b.fidelity);
}

TEST_CASE("reruns are byte-identical and manifests re-validate") {
  const ScenarioConfig cfg = small_custom();
  const auto d1 = scratch_dir("det1");
  const auto d2 = scratch_dir("det2");
  write_outputs(run_scenario(cfg), d1);
  ScenarioConfig serial = cfg;
  serial.workers = 1;
  write_outputs(run_scenario(serial), d2);
  CHECK(slurp(d1 / "custom.csv") == slurp(d2 / "custom.csv"));
  CHECK_FALSE(slurp(d1 / "custom.csv").empty());

  const auto designs = load_manifest_designs(d1 / "custom.manifest.json");
  REQUIRE(designs.size() == 1);
  CHECK(designs[0].label() == "unshaped_1_0_0");
  const auto manifest = nlohmann::json::parse(slurp(d1 / "custom.manifest.json"));
  CHECK(manifest.at("designs")[0].at("delta").get<double>() == doctest::Approx(std::exp(1.0)));
  CHECK(manifest.contains("diagnostics"));
  CHECK(manifest.contains("version"));

  // A tampered manifest fails validation.
  auto bad = manifest;
  bad["designs"][0]["omega"] = 0.0;
  std::ofstream(d1 / "bad.json") << bad.dump();
  CHECK_THROWS(load_manifest_designs(d1 / "bad.json"));
}

TEST_CASE("sweeps are deterministic regardless of worker count") {
  ScenarioConfig cfg = small_custom();
  cfg.sweep = parse_range("delta", "-0.04:0.04:5");
  const ScenarioOutput a = run_sweep(cfg);
  cfg.workers = 1;
  const ScenarioOutput b = run_sweep(cfg);
  CHECK(a.name == "sweep_delta");
  CHECK(a.table.to_string() == b.table.to_string());
  const auto f = a.table.numeric_column("fidelity");
  REQUIRE(f.size() == 5);
  CHECK(f[2] > f[0]);
  CHECK(f[2] > f[4]);
}

TEST_CASE("physical units relabel the time axis") {
  ScenarioConfig cfg = small_custom();
  cfg.units = UnitsMode::physical;
  const ScenarioOutput out = run_scenario(cfg);
  const auto t = out.table.numeric_column("time_ns");
  CHECK(t.back() == doctest::Approx(to_ns(solve_unshaped(1, 0, 0, kPi, 1.0).tau)));
}

TEST_CASE("output directory override") {
  ScenarioConfig cfg = small_custom();
  cfg.output_dir = "configured";
  ::unsetenv("GATESIM_OUT");
  CHECK(resolve_output_dir(cfg) == std::filesystem::path("configured"));
  ::setenv("GATESIM_OUT", "/tmp/elsewhere", 1);
  CHECK(resolve_output_dir(cfg) == std::filesystem::path("/tmp/elsewhere"));
  ::unsetenv("GATESIM_OUT");
}

TEST_CASE("surfaces coincide when their amplitudes do") {
  ScenarioConfig cfg = default_config(ScenarioId::fig7);
  cfg.n_fock = 10;
  cfg.surface.kappa_mhz = 0.0;
  cfg.surface.gamma_mhz = 0.0;
  const GateDesign nominal = cfg.design.solve();
  const SurfaceSetting a{"A", 50.0, -139.01};
  const SurfaceSetting b{"B", 50.0, -139.01};
  const GateRun ra = surface_point(nominal, a, 3.6, 556.05, cfg);
  const GateRun rb = surface_point(nominal, b, 3.6, 556.05, cfg);
  CHECK(ra.fidelity == rb.fidelity);
  CHECK(ra.fidelity > 0.99);
}

TEST_CASE("invalid configurations are rejected before running") {
  ScenarioConfig cfg = small_custom();
  cfg.n_fock = 1;
  CHECK_THROWS_AS(run_scenario(cfg), ConfigError);
  cfg = small_custom();
  cfg.design.k2 = 1;  // infeasible phase conditions for phi = pi
  CHECK_THROWS_AS(run_scenario(cfg), ConfigError);
}

}  // TEST_SUITE
