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
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sfm {

enum class ColumnKind { kNumeric, kCategorical };

// One named column. Numeric cells live in `numeric` (NaN when missing);
// categorical cells are codes into `levels` (-1 when missing). Levels are kept
// in first-appearance order.
struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::kNumeric;
  std::vector<double> numeric;
  std::vector<std::int32_t> codes;
  std::vector<std::string> levels;
  std::vector<std::uint8_t> missing;

  std::size_t size() const { return missing.size(); }
  bool is_missing(std::size_t row) const { return missing[row] != 0; }
  // Text of a cell as it would be written back to disk; empty when missing.
  std::string cell_text(std::size_t row) const;

  static Column make_numeric(std::string name, std::vector<double> values);
  static Column make_categorical(std::string name, const std::vector<std::string>& cells);
};

// Role tags of the Standard Fairness Model: attribute X with levels x0
// (minority) and x1 (majority), confounders Z, mediators W, binary outcome Y.
struct RoleSchema {
  std::string attribute_column;
  std::string minority_level;
  std::string majority_level;
  std::vector<std::string> confounder_columns;
  std::vector<std::string> mediator_columns;
  std::string outcome_column;
  std::optional<std::string> age_column;
  std::optional<std::string> admission_type_column;
  std::optional<std::string> area_column;
  std::optional<std::string> year_column;
  std::optional<std::string> readmission_column;

  // Throws ConfigError when roles overlap or the group labels coincide.
  void validate() const;
  std::vector<std::string> referenced_columns() const;
};

struct LoadOptions {
  char delimiter = ',';
  // Columns read as categorical even when every cell parses as a number.
  std::vector<std::string> categorical;
  // Value substituted for missing numeric Z/W cells when building features.
  double default_sentinel = -1.0;
  std::map<std::string, double> sentinels;
  std::vector<std::string> missing_tokens = {"", "NA"};
};

// Immutable typed table with role tags. Rows with a missing outcome are never
// present; rows with a missing attribute are kept and flagged.
class SfmDataset {
 public:
  SfmDataset() = default;
  SfmDataset(RoleSchema schema, std::vector<Column> columns, LoadOptions options = {},
             std::string id = {});

  std::size_t n_rows() const { return n_rows_; }
  const RoleSchema& schema() const { return schema_; }
  const LoadOptions& options() const { return options_; }
  const std::vector<Column>& columns() const { return columns_; }
  const std::string& id() const { return id_; }
  std::size_t rejected_rows() const { return rejected_rows_; }

  bool has_column(std::string_view name) const;
  // Throws SchemaError naming the column when absent.
  const Column& column(std::string_view name) const;
  double sentinel(std::string_view column) const;

  // 0 = minority (x0), 1 = majority (x1), -1 = missing.
  std::vector<std::int8_t> attribute() const;
  std::vector<std::uint8_t> attribute_mask() const;
  std::size_t attribute_missing_count() const;
  // Binary outcome as doubles. `column` defaults to the schema outcome; rows
  // with a missing value are rejected with ValidationError.
  std::vector<double> outcome(std::string_view column = {}) const;

  SfmDataset subset(std::span<const std::size_t> rows) const;
  // Rows whose attribute is observed.
  SfmDataset complete_attribute() const;
  // Copy with the attribute column replaced (0/1 per row, no missing).
  SfmDataset with_attribute(std::span<const std::int8_t> levels) const;
  // Copy using another binary column (e.g. readmission) as the outcome; rows
  // where it is missing are dropped.
  SfmDataset with_outcome(const std::string& column) const;

  void set_rejected_rows(std::size_t n) { rejected_rows_ = n; }

 private:
  void validate() const;

  RoleSchema schema_;
  std::vector<Column> columns_;
  LoadOptions options_;
  std::string id_;
  std::size_t n_rows_ = 0;
  std::size_t rejected_rows_ = 0;
};

// Delimited-text helpers shared by every tabular reader and writer.
// RFC 4180-style splitting: quoted fields, doubled quotes, embedded
// delimiters and newlines; blank lines are skipped.
std::vector<std::vector<std::string>> split_records(std::string_view text, char delim);
std::string quote_field(const std::string& s, char delim);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

SfmDataset load_dataset(const std::string& path, const RoleSchema& schema,
                        const LoadOptions& options = {});
// Parses delimited text already in memory; `id` labels the dataset.
SfmDataset parse_dataset(std::string_view text, const RoleSchema& schema,
                         const LoadOptions& options = {}, std::string id = "memory");
void write_dataset(const SfmDataset& ds, const std::string& path, char delimiter = ',');
std::string format_dataset(const SfmDataset& ds, char delimiter = ',');

struct FilterRule {
  enum class Kind { kRange, kLevels, kNonMissing };
  std::string column;
  Kind kind = Kind::kNonMissing;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_inclusive = true;
  bool hi_inclusive = true;
  std::vector<std::string> levels;

  static FilterRule range(std::string column, double lo, double hi);
  static FilterRule at_least(std::string column, double lo);
  static FilterRule in_levels(std::string column, std::vector<std::string> levels);
  static FilterRule non_missing(std::string column);
  // Parses "age >= 18", "age in 18..100", "sex in {F,M}", "ses present".
  static FilterRule parse(std::string_view text);

  bool keeps(const Column& col, std::size_t row) const;
  std::string describe() const;
};

struct ExclusionEntry {
  std::size_t rule_index = 0;
  std::string description;
  std::size_t removed = 0;
  std::size_t remaining = 0;
};

struct FilterResult {
  SfmDataset dataset;
  std::vector<ExclusionEntry> log;
};

// Applies rules in order; the log records rows removed by each rule.
FilterResult filter_cohort(const SfmDataset& ds, std::span<const FilterRule> rules);

}  // namespace sfm
