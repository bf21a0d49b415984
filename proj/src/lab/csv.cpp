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

#include <gatesim/lab/csv.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace gatesim::lab {

std::string format_number(double value) {
  // Avoid "-0" so reruns that land on either zero print the same bytes.
  if (value == 0.0) value = 0.0;
  return fmt::format("{:.12g}", value);
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) throw std::invalid_argument("CsvTable: no columns");
  for (const auto& c : columns_) {
    if (c.empty() || c.find_first_of(",\n\"") != std::string::npos) {
      throw std::invalid_argument("CsvTable: bad column name '" + c + "'");
    }
  }
}

void CsvTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size()) throw std::invalid_argument("CsvTable: row width mismatch");
  rows_.push_back(std::move(row));
}

std::vector<double> CsvTable::numeric_column(const std::string& name) const {
  const auto it = std::find(columns_.begin(), columns_.end(), name);
  if (it == columns_.end()) throw std::out_of_range("CsvTable: no column '" + name + "'");
  const auto idx = static_cast<std::size_t>(it - columns_.begin());
  std::vector<double> out;
  for (const auto& row : rows_) {
    const auto* v = std::get_if<double>(&row[idx]);
    if (!v) throw std::out_of_range("CsvTable: column '" + name + "' is not numeric");
    out.push_back(*v);
  }
  return out;
}

std::string CsvTable::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i) out += ',';
    out += columns_[i];
  }
  out += '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      if (const auto* v = std::get_if<double>(&row[i])) {
        out += format_number(*v);
      } else {
        out += std::get<std::string>(row[i]);
      }
    }
    out += '\n';
  }
  return out;
}

void CsvTable::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << to_string();
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace gatesim::lab
