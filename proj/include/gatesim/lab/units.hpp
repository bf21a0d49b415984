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

// Natural units set the coupling anchor g = 1. A natural frequency x is
// x * g / 2 pi in MHz; a natural time t is t / (2 pi g / 2 pi) in microseconds.

#include <gatesim/gate.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace gatesim::lab {

enum class Unit {
  natural,
  mhz,  // frequency / 2 pi in MHz
  ns,
};

struct UnitContext {
  double g_mhz = 50.0;  // anchor coupling g / 2 pi
};

/// "natural", "MHz" or "ns" (case-insensitive). Throws std::invalid_argument otherwise.
Unit parse_unit(std::string_view name);
std::string unit_name(Unit unit);

/// Exact linear conversion. Natural takes the dimension of the other unit;
/// MHz <-> ns is rejected.
double convert_units(double value, Unit from, Unit to, const UnitContext& ctx = {});

inline double to_mhz(double natural, const UnitContext& ctx = {}) {
  return convert_units(natural, Unit::natural, Unit::mhz, ctx);
}
inline double to_ns(double natural, const UnitContext& ctx = {}) {
  return convert_units(natural, Unit::natural, Unit::ns, ctx);
}
inline double from_mhz(double mhz, const UnitContext& ctx = {}) {
  return convert_units(mhz, Unit::mhz, Unit::natural, ctx);
}
inline double from_ns(double ns, const UnitContext& ctx = {}) {
  return convert_units(ns, Unit::ns, Unit::natural, ctx);
}

/// The quoted 0.16 ns gate time for the unshaped (1, 0, 0) gate at r_p = 2.5
/// and g / 2 pi = 50 MHz, against tau = 2 pi / (g e^{r_p}). Empty for any
/// other design or anchor.
std::optional<Discrepancy> gate_time_discrepancy(const GateDesign& design, const UnitContext& ctx = {});

/// Design warnings plus any unit-level discrepancy.
std::vector<std::string> physical_warnings(const GateDesign& design, const UnitContext& ctx = {});

}  // namespace gatesim::lab
