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

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace gatesim::lab {

using Cell = std::variant<double, std::string>;

/// Header row plus rows of numbers and tags. Numbers print with 12
/// significant digits, ',' separators and '\n' line ends.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }

  /// Throws std::invalid_argument when the width differs from the header.
  void add_row(std::vector<Cell> row);
  /// Column by name; throws std::out_of_range when absent or not numeric.
  std::vector<double> numeric_column(const std::string& name) const;

  std::string to_string() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

std::string format_number(double value);

}  // namespace gatesim::lab
