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
#include <span>
#include <string>
#include <vector>

#include "sfm/dataset.hpp"

namespace sfm {

// Dense column-major design matrix.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::vector<std::string> names;
  std::vector<double> values;

  std::size_t cols() const { return names.size(); }
  double at(std::size_t r, std::size_t c) const { return values[c * rows + r]; }
  std::span<const double> column(std::size_t c) const {
    return {values.data() + c * rows, rows};
  }
  std::span<double> column(std::size_t c) { return {values.data() + c * rows, rows}; }
  void add_column(std::string name, std::span<const double> col);
};

// Numeric columns pass through with missing cells replaced by the column's
// sentinel. Categorical columns are one-hot encoded in level order, with an
// extra indicator when any cell is missing.
FeatureMatrix build_features(const SfmDataset& ds, std::span<const std::string> columns);

// Rows `rows` of `fm`, in the given order.
FeatureMatrix select_rows(const FeatureMatrix& fm, std::span<const std::size_t> rows);

// Distinct rows of `fm` in first-appearance order; row r of `fm` equals row
// index[r] of `unique`.
struct UniqueRows {
  FeatureMatrix unique;
  std::vector<std::uint32_t> index;
};
UniqueRows unique_rows(const FeatureMatrix& fm);

// [lead | rest]
FeatureMatrix prepend_column(const FeatureMatrix& rest, std::string name, std::span<const double> lead);

}  // namespace sfm
