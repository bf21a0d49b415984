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

#include <gatesim/lab/units.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gatesim::lab {

namespace {

constexpr double kQuotedGateTimeNs = 0.16;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

Unit parse_unit(std::string_view name) {
  const std::string n = lower(name);
  if (n == "natural") return Unit::natural;
  if (n == "mhz") return Unit::mhz;
  if (n == "ns") return Unit::ns;
  throw std::invalid_argument("unknown unit '" + std::string(name) + "' (expected natural, MHz or ns)");
}

std::string unit_name(Unit unit) {
  switch (unit) {
    case Unit::natural: return "natural";
    case Unit::mhz: return "MHz";
    case Unit::ns: return "ns";
  }
  return "?";
}

double convert_units(double value, Unit from, Unit to, const UnitContext& ctx) {
  if (!(ctx.g_mhz > 0.0) || !std::isfinite(ctx.g_mhz)) {
    throw std::invalid_argument("convert_units: coupling anchor must be positive");
  }
  if (from == to) return value;
  if ((from == Unit::mhz && to == Unit::ns) || (from == Unit::ns && to == Unit::mhz)) {
    throw std::invalid_argument("convert_units: cannot convert between MHz and ns");
  }
  // 1 natural time unit = 1 / g = 1 / (2 pi g_mhz MHz) = 1000 / (2 pi g_mhz) ns.
  const double ns_per_natural = 1000.0 / (2.0 * std::numbers::pi * ctx.g_mhz);
  switch (from) {
    case Unit::natural: return to == Unit::mhz ? value * ctx.g_mhz : value * ns_per_natural;
    case Unit::mhz: return value / ctx.g_mhz;
    case Unit::ns: return value / ns_per_natural;
  }
  throw std::invalid_argument("convert_units: unknown unit");
}

std::optional<Discrepancy> gate_time_discrepancy(const GateDesign& design, const UnitContext& ctx) {
  const auto* gate = std::get_if<UnshapedGate>(&design.variant);
  if (!gate || gate->k1 != 1 || gate->k2 != 0 || gate->k3 != 0) return std::nullopt;
  if (std::abs(design.r_p - 2.5) > 1e-9 || std::abs(ctx.g_mhz - 50.0) > 1e-9) return std::nullopt;
  const double computed = to_ns(design.tau, ctx);
  return Discrepancy{
      .code = "gate_time",
      .message = fmt::format("gate time quoted as {} ns for g/2pi = {} MHz and r_p = {}, but tau = 2pi/(g e^r_p) = {:.4f} ns; "
                             "the computed value is used",
                             kQuotedGateTimeNs, ctx.g_mhz, design.r_p, computed),
      .quoted = kQuotedGateTimeNs,
      .computed = computed,
  };
}

std::vector<std::string> physical_warnings(const GateDesign& design, const UnitContext& ctx) {
  std::vector<std::string> out = design.warnings;
  if (auto d = gate_time_discrepancy(design, ctx)) out.push_back(d->message);
  return out;
}

}  // namespace gatesim::lab
