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

#include "sfm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>

#include "sfm/error.hpp"

namespace sfm {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> parse_double(std::string_view s) {
  const std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = t.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
  return v;
}

bool contains(const std::vector<std::string>& v, std::string_view s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

void check_binary(const Column& col, bool allow_missing) {
  std::set<std::string> bad;
  for (std::size_t r = 0; r < col.size(); ++r) {
    if (col.is_missing(r)) {
      if (!allow_missing) bad.insert("<missing>");
      continue;
    }
    if (col.kind == ColumnKind::kNumeric) {
      const double v = col.numeric[r];
      if (v != 0.0 && v != 1.0) bad.insert(col.cell_text(r));
    } else {
      bad.insert(col.cell_text(r));
    }
  }
  if (!bad.empty()) {
    std::string list;
    std::size_t shown = 0;
    for (const auto& b : bad) {
      if (shown++ == 10) {
        list += ", ...";
        break;
      }
      list += (list.empty() ? "" : ", ") + b;
    }
    throw ValidationError(fmt::format("column '{}' must be binary 0/1; offending values: {}",
                                      col.name, list));
  }
}

}  // namespace

// RFC 4180-style record splitter: quoted fields, doubled quotes, embedded
// delimiters and newlines.
std::vector<std::vector<std::string>> split_records(std::string_view text, char delim) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    if (ch == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (ch == delim) {
      row.push_back(std::move(field));
      field.clear();
      field_started = false;
    } else if (ch == '\n' || ch == '\r') {
      if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(std::move(field));
      field.clear();
      field_started = false;
      if (!(row.size() == 1 && row[0].empty())) records.push_back(std::move(row));
      row.clear();
    } else {
      field.push_back(ch);
      field_started = true;
    }
  }
  if (in_quotes) throw ValidationError("unterminated quoted field in delimited text");
  if (field_started || !row.empty()) {
    row.push_back(std::move(field));
    records.push_back(std::move(row));
  }
  return records;
}

std::string quote_field(const std::string& s, char delim) {
  if (s.find_first_of(std::string{delim, '"', '\n', '\r'}) == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}


std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write file '" + path + "'");
  out << text;
  if (!out) throw IoError("failed writing file '" + path + "'");
}


std::string Column::cell_text(std::size_t row) const {
  if (is_missing(row)) return {};
  if (kind == ColumnKind::kNumeric) return fmt::format("{}", numeric[row]);
  return levels[static_cast<std::size_t>(codes[row])];
}

Column Column::make_numeric(std::string name, std::vector<double> values) {
  Column c;
  c.name = std::move(name);
  c.kind = ColumnKind::kNumeric;
  c.missing.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) c.missing[i] = std::isnan(values[i]) ? 1 : 0;
  c.numeric = std::move(values);
  return c;
}

Column Column::make_categorical(std::string name, const std::vector<std::string>& cells) {
  Column c;
  c.name = std::move(name);
  c.kind = ColumnKind::kCategorical;
  c.codes.resize(cells.size());
  c.missing.resize(cells.size());
  std::unordered_map<std::string, std::int32_t> index;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].empty()) {
      c.codes[i] = -1;
      c.missing[i] = 1;
      continue;
    }
    auto [it, inserted] = index.try_emplace(cells[i], static_cast<std::int32_t>(c.levels.size()));
    if (inserted) c.levels.push_back(cells[i]);
    c.codes[i] = it->second;
  }
  return c;
}

void RoleSchema::validate() const {
  if (attribute_column.empty()) throw ConfigError("attribute column not configured");
  if (outcome_column.empty()) throw ConfigError("outcome column not configured");
  if (minority_level.empty() || majority_level.empty())
    throw ConfigError("minority and majority levels must both be configured");
  if (minority_level == majority_level)
    throw ConfigError("minority and majority levels must differ: '" + minority_level + "'");
  if (attribute_column == outcome_column)
    throw ConfigError("attribute and outcome columns must differ");
  for (const auto* list : {&confounder_columns, &mediator_columns}) {
    for (const auto& c : *list) {
      if (c == attribute_column || c == outcome_column)
        throw ConfigError("column '" + c + "' is tagged both as Z/W and as X/Y");
    }
  }
  for (const auto& c : confounder_columns) {
    if (contains(mediator_columns, c))
      throw ConfigError("column '" + c + "' is tagged both as confounder and mediator");
  }
}

std::vector<std::string> RoleSchema::referenced_columns() const {
  std::vector<std::string> cols{attribute_column, outcome_column};
  cols.insert(cols.end(), confounder_columns.begin(), confounder_columns.end());
  cols.insert(cols.end(), mediator_columns.begin(), mediator_columns.end());
  for (const auto* opt : {&age_column, &admission_type_column, &area_column, &year_column,
                          &readmission_column}) {
    if (*opt && !contains(cols, **opt)) cols.push_back(**opt);
  }
  return cols;
}

SfmDataset::SfmDataset(RoleSchema schema, std::vector<Column> columns, LoadOptions options,
                       std::string id)
    : schema_(std::move(schema)),
      columns_(std::move(columns)),
      options_(std::move(options)),
      id_(std::move(id)) {
  n_rows_ = columns_.empty() ? 0 : columns_.front().size();
  validate();
}

void SfmDataset::validate() const {
  schema_.validate();
  for (const auto& c : columns_) {
    if (c.size() != n_rows_)
      throw InternalError("column '" + c.name + "' has inconsistent length");
  }
  for (const auto& name : schema_.referenced_columns()) {
    if (!has_column(name)) throw SchemaError("configured column '" + name + "' not found in data");
  }
  const Column& x = column(schema_.attribute_column);
  std::set<std::string> bad;
  for (std::size_t r = 0; r < n_rows_; ++r) {
    if (x.is_missing(r)) continue;
    const std::string t = x.cell_text(r);
    if (t != schema_.minority_level && t != schema_.majority_level) bad.insert(t);
  }
  if (!bad.empty()) {
    std::string list;
    for (const auto& b : bad) list += (list.empty() ? "" : ", ") + b;
    throw ValidationError(fmt::format("attribute column '{}' has levels other than '{}'/'{}': {}",
                                      x.name, schema_.minority_level, schema_.majority_level,
                                      list));
  }
  check_binary(column(schema_.outcome_column), false);
  if (schema_.readmission_column) check_binary(column(*schema_.readmission_column), true);
}

bool SfmDataset::has_column(std::string_view name) const {
  return std::any_of(columns_.begin(), columns_.end(),
                     [&](const Column& c) { return c.name == name; });
}

const Column& SfmDataset::column(std::string_view name) const {
  for (const auto& c : columns_) {
    if (c.name == name) return c;
  }
  throw SchemaError("unknown column '" + std::string(name) + "'");
}

double SfmDataset::sentinel(std::string_view column) const {
  const auto it = options_.sentinels.find(std::string(column));
  return it == options_.sentinels.end() ? options_.default_sentinel : it->second;
}

std::vector<std::int8_t> SfmDataset::attribute() const {
  const Column& x = column(schema_.attribute_column);
  std::vector<std::int8_t> out(n_rows_, -1);
  for (std::size_t r = 0; r < n_rows_; ++r) {
    if (x.is_missing(r)) continue;
    out[r] = x.cell_text(r) == schema_.minority_level ? 0 : 1;
  }
  return out;
}

std::vector<std::uint8_t> SfmDataset::attribute_mask() const {
  return column(schema_.attribute_column).missing;
}

std::size_t SfmDataset::attribute_missing_count() const {
  const auto& m = column(schema_.attribute_column).missing;
  return static_cast<std::size_t>(std::count(m.begin(), m.end(), std::uint8_t{1}));
}

std::vector<double> SfmDataset::outcome(std::string_view name) const {
  const Column& y = column(name.empty() ? std::string_view(schema_.outcome_column) : name);
  check_binary(y, false);
  std::vector<double> out(n_rows_);
  for (std::size_t r = 0; r < n_rows_; ++r) out[r] = y.numeric[r];
  return out;
}

SfmDataset SfmDataset::subset(std::span<const std::size_t> rows) const {
  std::vector<Column> cols;
  cols.reserve(columns_.size());
  for (const auto& c : columns_) {
    Column s;
    s.name = c.name;
    s.kind = c.kind;
    s.levels = c.levels;
    s.missing.resize(rows.size());
    if (c.kind == ColumnKind::kNumeric) s.numeric.resize(rows.size());
    else s.codes.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::size_t r = rows[i];
      if (r >= n_rows_) throw InternalError("subset row index out of range");
      s.missing[i] = c.missing[r];
      if (c.kind == ColumnKind::kNumeric) s.numeric[i] = c.numeric[r];
      else s.codes[i] = c.codes[r];
    }
    cols.push_back(std::move(s));
  }
  SfmDataset out(schema_, std::move(cols), options_, id_);
  out.rejected_rows_ = rejected_rows_;
  return out;
}

SfmDataset SfmDataset::complete_attribute() const {
  const auto& mask = attribute_mask();
  std::vector<std::size_t> rows;
  rows.reserve(n_rows_);
  for (std::size_t r = 0; r < n_rows_; ++r) {
    if (!mask[r]) rows.push_back(r);
  }
  return subset(rows);
}

SfmDataset SfmDataset::with_attribute(std::span<const std::int8_t> levels) const {
  if (levels.size() != n_rows_) throw InternalError("attribute vector length mismatch");
  std::vector<std::string> cells(n_rows_);
  for (std::size_t r = 0; r < n_rows_; ++r) {
    if (levels[r] < 0) continue;
    cells[r] = levels[r] == 0 ? schema_.minority_level : schema_.majority_level;
  }
  std::vector<Column> cols = columns_;
  for (auto& c : cols) {
    if (c.name == schema_.attribute_column) c = Column::make_categorical(c.name, cells);
  }
  SfmDataset out(schema_, std::move(cols), options_, id_);
  out.rejected_rows_ = rejected_rows_;
  return out;
}

SfmDataset SfmDataset::with_outcome(const std::string& name) const {
  const Column& y = column(name);
  check_binary(y, true);
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < n_rows_; ++r) {
    if (!y.is_missing(r)) rows.push_back(r);
  }
  SfmDataset sub = subset(rows);
  RoleSchema schema = schema_;
  if (name != schema.outcome_column) {
    if (schema.readmission_column == name) schema.readmission_column.reset();
    // The former outcome stays in the table as an ordinary column.
    schema.outcome_column = name;
  }
  SfmDataset out(std::move(schema), sub.columns_, options_, id_ + "#" + name);
  out.rejected_rows_ = rejected_rows_;
  return out;
}

SfmDataset parse_dataset(std::string_view text, const RoleSchema& schema,
                         const LoadOptions& options, std::string id) {
  schema.validate();
  auto records = split_records(text, options.delimiter);
  if (records.empty()) throw ValidationError("data has no header row");
  std::vector<std::string> header;
  for (const auto& h : records.front()) header.push_back(trim(h));
  for (const auto& name : schema.referenced_columns()) {
    if (!contains(header, name)) throw SchemaError("configured column '" + name + "' not found in data header");
  }
  const std::size_t width = header.size();
  const std::size_t n = records.size() - 1;
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].size() != width)
      throw ValidationError(fmt::format("row {} has {} fields, header has {}", i, records[i].size(), width));
  }

  auto is_missing_token = [&](const std::string& s) { return contains(options.missing_tokens, trim(s)); };

  // Rows with missing outcome are rejected up front.
  const auto y_index = static_cast<std::size_t>(
      std::find(header.begin(), header.end(), schema.outcome_column) - header.begin());
  std::vector<std::size_t> keep;
  keep.reserve(n);
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (!is_missing_token(records[i][y_index])) keep.push_back(i);
  }

  std::vector<Column> cols;
  cols.reserve(width);
  for (std::size_t j = 0; j < width; ++j) {
    const bool force_cat = contains(options.categorical, header[j]) ||
                           header[j] == schema.attribute_column ||
                           (schema.admission_type_column && header[j] == *schema.admission_type_column) ||
                           (schema.area_column && header[j] == *schema.area_column);
    bool numeric = !force_cat;
    std::vector<double> values(keep.size(), std::numeric_limits<double>::quiet_NaN());
    if (numeric) {
      for (std::size_t k = 0; k < keep.size(); ++k) {
        const auto& cell = records[keep[k]][j];
        if (is_missing_token(cell)) continue;
        auto v = parse_double(cell);
        if (!v) {
          numeric = false;
          break;
        }
        values[k] = *v;
      }
    }
    if (numeric) {
      cols.push_back(Column::make_numeric(header[j], std::move(values)));
    } else {
      std::vector<std::string> cells(keep.size());
      for (std::size_t k = 0; k < keep.size(); ++k) {
        const auto& cell = records[keep[k]][j];
        cells[k] = is_missing_token(cell) ? std::string{} : trim(cell);
      }
      cols.push_back(Column::make_categorical(header[j], cells));
    }
  }
  SfmDataset ds(schema, std::move(cols), options, std::move(id));
  ds.set_rejected_rows(n - keep.size());
  return ds;
}

SfmDataset load_dataset(const std::string& path, const RoleSchema& schema, const LoadOptions& options) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw IoError("cannot open data file '" + path + "'");
  return parse_dataset(read_text_file(path), schema, options, path);
}

std::string format_dataset(const SfmDataset& ds, char delimiter) {
  std::string out;
  const auto& cols = ds.columns();
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (j) out.push_back(delimiter);
    out += quote_field(cols[j].name, delimiter);
  }
  out.push_back('\n');
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (j) out.push_back(delimiter);
      out += quote_field(cols[j].cell_text(r), delimiter);
    }
    out.push_back('\n');
  }
  return out;
}

void write_dataset(const SfmDataset& ds, const std::string& path, char delimiter) {
  write_text_file(path, format_dataset(ds, delimiter));
}

FilterRule FilterRule::range(std::string column, double lo, double hi) {
  FilterRule r;
  r.column = std::move(column);
  r.kind = Kind::kRange;
  r.lo = lo;
  r.hi = hi;
  return r;
}

FilterRule FilterRule::at_least(std::string column, double lo) {
  return range(std::move(column), lo, std::numeric_limits<double>::infinity());
}

FilterRule FilterRule::in_levels(std::string column, std::vector<std::string> levels) {
  FilterRule r;
  r.column = std::move(column);
  r.kind = Kind::kLevels;
  r.levels = std::move(levels);
  return r;
}

FilterRule FilterRule::non_missing(std::string column) {
  FilterRule r;
  r.column = std::move(column);
  r.kind = Kind::kNonMissing;
  return r;
}

FilterRule FilterRule::parse(std::string_view text) {
  const std::string t = trim(text);
  auto fail = [&]() -> FilterRule { throw ConfigError("cannot parse filter rule '" + t + "'"); };
  for (const std::string op : {">=", "<=", ">", "<"}) {
    const auto pos = t.find(op);
    if (pos == std::string::npos) continue;
    const std::string col = trim(t.substr(0, pos));
    const auto v = parse_double(t.substr(pos + op.size()));
    if (col.empty() || !v) return fail();
    FilterRule r = range(col, -std::numeric_limits<double>::infinity(),
                         std::numeric_limits<double>::infinity());
    if (op[0] == '>') {
      r.lo = *v;
      r.lo_inclusive = op.size() == 2;
    } else {
      r.hi = *v;
      r.hi_inclusive = op.size() == 2;
    }
    return r;
  }
  const auto in_pos = t.find(" in ");
  if (in_pos != std::string::npos) {
    const std::string col = trim(t.substr(0, in_pos));
    const std::string rhs = trim(t.substr(in_pos + 4));
    if (rhs.size() >= 2 && rhs.front() == '{' && rhs.back() == '}') {
      std::vector<std::string> levels;
      std::stringstream ss(rhs.substr(1, rhs.size() - 2));
      std::string item;
      while (std::getline(ss, item, ',')) levels.push_back(trim(item));
      return in_levels(col, levels);
    }
    const auto dots = rhs.find("..");
    if (dots != std::string::npos) {
      const auto lo = parse_double(rhs.substr(0, dots));
      const auto hi = parse_double(rhs.substr(dots + 2));
      if (!lo || !hi) return fail();
      return range(col, *lo, *hi);
    }
    return fail();
  }
  const auto sp = t.find(' ');
  if (sp != std::string::npos && trim(t.substr(sp)) == "present") return non_missing(trim(t.substr(0, sp)));
  return fail();
}

bool FilterRule::keeps(const Column& col, std::size_t row) const {
  if (col.is_missing(row)) return false;
  switch (kind) {
    case Kind::kNonMissing:
      return true;
    case Kind::kLevels:
      return contains(levels, col.cell_text(row));
    case Kind::kRange: {
      if (col.kind != ColumnKind::kNumeric)
        throw ConfigError("range rule on non-numeric column '" + column + "'");
      const double v = col.numeric[row];
      const bool lo_ok = lo_inclusive ? v >= lo : v > lo;
      const bool hi_ok = hi_inclusive ? v <= hi : v < hi;
      return lo_ok && hi_ok;
    }
  }
  return false;
}

std::string FilterRule::describe() const {
  switch (kind) {
    case Kind::kNonMissing:
      return column + " present";
    case Kind::kLevels: {
      std::string s;
      for (const auto& l : levels) s += (s.empty() ? "" : ",") + l;
      return column + " in {" + s + "}";
    }
    case Kind::kRange:
      if (std::isinf(hi)) return fmt::format("{} {} {}", column, lo_inclusive ? ">=" : ">", lo);
      if (std::isinf(lo)) return fmt::format("{} {} {}", column, hi_inclusive ? "<=" : "<", hi);
      return fmt::format("{} in {}..{}", column, lo, hi);
  }
  return column;
}

FilterResult filter_cohort(const SfmDataset& ds, std::span<const FilterRule> rules) {
  std::vector<std::size_t> rows(ds.n_rows());
  for (std::size_t r = 0; r < rows.size(); ++r) rows[r] = r;
  std::vector<ExclusionEntry> log;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const auto& rule = rules[i];
    if (!ds.has_column(rule.column))
      throw SchemaError("filter rule references unknown column '" + rule.column + "'");
    const Column& col = ds.column(rule.column);
    std::vector<std::size_t> kept;
    kept.reserve(rows.size());
    for (std::size_t r : rows) {
      if (rule.keeps(col, r)) kept.push_back(r);
    }
    log.push_back({i + 1, rule.describe(), rows.size() - kept.size(), kept.size()});
    rows = std::move(kept);
  }
  if (rules.empty()) return {ds, {}};
  return {ds.subset(rows), std::move(log)};
}

}  // namespace sfm
