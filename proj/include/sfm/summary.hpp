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

#include <array>
#include <string>
#include <vector>

#include "sfm/dataset.hpp"

namespace sfm {

struct GroupCount {
  std::string label;
  std::size_t n = 0;
  double percent = 0.0;
};

struct NumericGroupStats {
  std::size_t n = 0;  // non-missing cells
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double mean = 0.0;
};

struct LevelShare {
  std::string level;
  std::array<std::size_t, 2> count{};
  std::array<double, 2> percent{};
};

struct VariableSummary {
  std::string name;
  ColumnKind kind = ColumnKind::kNumeric;
  std::array<NumericGroupStats, 2> numeric{};  // kNumeric only
  std::vector<LevelShare> levels;              // kCategorical only
  std::string test;                            // "rank-sum" or "chi-square"
  double p_value = 1.0;
};

// Two-group cohort characteristics, index 0 = minority, 1 = majority.
struct CohortSummary {
  std::array<GroupCount, 2> groups{};
  std::size_t attribute_missing = 0;
  std::vector<VariableSummary> variables;
};

// Median/IQR/mean with rank-sum p-values for numeric variables; counts and
// chi-square p-values for categorical ones. Rows with missing attribute are
// excluded; missing cells of a variable are excluded from that variable.
CohortSummary summarize_cohort(const SfmDataset& ds, const std::vector<std::string>& variables);

}  // namespace sfm
