/*
 * Copyright 2026 The sfm-decomp Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sfm {

// Closed age interval [lo, hi].
struct AgeBin {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double age) const { return age >= lo && age <= hi; }
  std::string label() const;
};

struct CellGrid {
  std::vector<AgeBin> age_bins;
  std::vector<std::string> admission_types;

  // Bins ordered and disjoint, at least one bin and one type.
  void validate() const;
  std::size_t rows() const { return age_bins.size(); }
  std::size_t cols() const { return admission_types.size(); }
  std::optional<std::size_t> bin_of(double age) const;
  std::optional<std::size_t> type_of(const std::string& type) const;

  static std::vector<AgeBin> default_effect_bins();  // 18-54, 55-64, 65-74, 75-100
  static std::vector<AgeBin> default_risk_bins();    // 18-49, 50-64, 65-74, 75-100
  static std::vector<std::string> default_admission_types();
  // "18-54,55-64" style list.
  static std::vector<AgeBin> parse_bins(const std::string& text);
};

// Row-major |bins| x |types| matrix of estimates.
struct Heatmap {
  CellGrid grid;
  std::vector<double> value;
  std::vector<double> ci_lo;
  std::vector<double> ci_hi;
  std::vector<std::size_t> n;
  std::vector<std::uint8_t> masked;
  std::vector<std::string> notes;

  static Heatmap empty_for(const CellGrid& grid);
  std::size_t index(std::size_t bin, std::size_t type) const { return bin * grid.cols() + type; }
  std::size_t size() const { return value.size(); }
};

}  // namespace sfm
