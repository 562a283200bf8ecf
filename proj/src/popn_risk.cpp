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

#include "sfm/popn_risk.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <tuple>

#include <fmt/format.h>

#include "sfm/error.hpp"
#include "sfm/rng.hpp"

namespace sfm {

namespace {

constexpr std::uint64_t kRiskBootTag = 0x72726174;  // "rrat"
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

double to_number(const std::string& text, const std::string& what, std::size_t line) {
  const std::string t = trim(text);
  double v = 0.0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || p != t.data() + t.size())
    throw ValidationError(fmt::format("line {}: {} '{}' is not a number", line, what, text));
  return v;
}

int to_year(const std::string& text, std::size_t line) {
  const double v = to_number(text, "year", line);
  if (v != std::floor(v)) throw ValidationError(fmt::format("line {}: year '{}' is not an integer", line, text));
  return static_cast<int>(v);
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::size_t col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw SchemaError("missing column '" + name + "'");
  }
};

Table read_table(std::string_view text, char delimiter) {
  auto records = split_records(text, delimiter);
  if (records.empty()) throw ValidationError("table has no header row");
  Table t;
  for (auto& h : records.front()) t.header.push_back(trim(h));
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].size() != t.header.size())
      throw ValidationError(fmt::format("line {}: expected {} fields, found {}", i + 1, t.header.size(), records[i].size()));
    t.rows.push_back(std::move(records[i]));
  }
  return t;
}

using CellKey = std::tuple<double, double, int>;  // age lo, age hi, year

bool is_national(const std::string& area) { return area.empty() || area == "national"; }

bool same_bin(const AgeBin& a, const AgeBin& b) { return a.lo == b.lo && a.hi == b.hi; }

struct RiskCell {
  AgeBin age;
  int year = 0;
  double minority = 0.0;
  double total = 0.0;
  double n[2] = {0.0, 0.0};
  double pop(int g) const { return g == 0 ? minority : total - minority; }
  std::string label() const { return fmt::format("age {} year {}", age.label(), year); }
};

std::vector<RiskCell> risk_cells(const CensusTable& census, const AdmissionCounts& admissions, const RiskEvent& event,
                                 const std::vector<std::string>& diagnoses) {
  bool has_national = false;
  for (const auto& r : census.records) has_national = has_national || is_national(r.area);
  auto census_match = [&](const CensusRecord& r) {
    if (event.area) return r.area == *event.area;
    return has_national ? is_national(r.area) : true;
  };
  auto in_age = [&](const AgeBin& a) {
    if (!event.age) return true;
    const bool inside = a.lo >= event.age->lo && a.hi <= event.age->hi;
    const bool overlaps = a.lo <= event.age->hi && a.hi >= event.age->lo;
    if (overlaps && !inside)
      throw ConfigError("census age group " + a.label() + " straddles age bin " + event.age->label());
    return inside;
  };
  std::set<int> years(event.years.begin(), event.years.end());
  std::set<int> available;
  for (const auto& r : census.records) {
    if (census_match(r)) available.insert(r.year);
  }
  for (int y : years) {
    if (!available.count(y)) throw ConfigError(fmt::format("census has no counts for year {} (interpolate first)", y));
  }
  std::map<CellKey, RiskCell> cells;
  for (const auto& r : census.records) {
    if (!census_match(r) || !in_age(r.age)) continue;
    if (!years.empty() && !years.count(r.year)) continue;
    RiskCell& c = cells[{r.age.lo, r.age.hi, r.year}];
    c.age = r.age;
    c.year = r.year;
    (r.group == "minority" ? c.minority : c.total) += r.count;
  }
  if (cells.empty()) throw DegenerateError("no census cells fall inside the event");
  std::set<std::string> dx(diagnoses.begin(), diagnoses.end());
  for (const auto& a : admissions.records) {
    if (event.area && a.area != *event.area) continue;
    if (!dx.empty() && !dx.count(a.diagnosis)) continue;
    if (!years.empty() && !years.count(a.year)) continue;
    if (!in_age(a.age)) continue;
    auto it = cells.find({a.age.lo, a.age.hi, a.year});
    if (it == cells.end()) {
      throw ConfigError(fmt::format("admissions for age {} year {} have no census denominator", a.age.label(), a.year));
    }
    it->second.n[a.group] += a.n;
  }
  std::vector<RiskCell> out;
  for (auto& [k, c] : cells) out.push_back(c);
  return out;
}

double total_population(const std::vector<RiskCell>& cells) {
  double t = 0.0;
  for (const auto& c : cells) t += c.total;
  if (!(t > 0.0)) throw DegenerateError("event has zero total population");
  return t;
}

void check_population(const std::vector<RiskCell>& cells, int group) {
  for (const auto& c : cells) {
    if (!(c.pop(group) > 0.0))
      throw DegenerateError(fmt::format("zero {} population in cell {}", group == 0 ? "minority" : "majority", c.label()));
  }
}

double mixed_risk(const std::vector<RiskCell>& cells, int group, double total, const double* counts = nullptr) {
  double r = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const double n = counts ? counts[i * 2 + static_cast<std::size_t>(group)] : cells[i].n[group];
    r += (cells[i].total / total) * (n / cells[i].pop(group));
  }
  return r;
}

}  // namespace

std::string provenance_name(Provenance p) {
  switch (p) {
    case Provenance::kAnchor: return "anchor";
    case Provenance::kInterpolated: return "interpolated";
    case Provenance::kExtrapolated: return "extrapolated";
    case Provenance::kConstant: return "constant";
  }
  return "anchor";
}

CensusTable CensusTable::parse(std::string_view text, char delimiter) {
  const Table t = read_table(text, delimiter);
  const std::size_t ca = t.col("area"), cy = t.col("year"), clo = t.col("age_lo"), chi = t.col("age_hi"),
                    cg = t.col("group"), cn = t.col("count");
  CensusTable out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const std::size_t line = i + 2;
    CensusRecord r;
    r.area = trim(row[ca]);
    r.year = to_year(row[cy], line);
    r.age = {to_number(row[clo], "age_lo", line), to_number(row[chi], "age_hi", line)};
    r.group = trim(row[cg]);
    if (r.group != "minority" && r.group != "total")
      throw ValidationError(fmt::format("line {}: census group must be minority or total, found '{}'", line, r.group));
    r.count = to_number(row[cn], "count", line);
    out.records.push_back(std::move(r));
  }
  out.validate();
  return out;
}

CensusTable CensusTable::load(const std::string& path, char delimiter) {
  return parse(read_text_file(path), delimiter);
}

std::string CensusTable::format(char delimiter) const {
  const char d = delimiter;
  std::string out = fmt::format("area{0}year{0}age_lo{0}age_hi{0}group{0}count{0}provenance\n", d);
  for (const auto& r : records) {
    out += fmt::format("{1}{0}{2}{0}{3:g}{0}{4:g}{0}{5}{0}{6:.17g}{0}{7}\n", d, quote_field(r.area, d), r.year, r.age.lo,
                       r.age.hi, r.group, r.count, provenance_name(r.provenance));
  }
  return out;
}

void CensusTable::validate() const {
  std::map<std::tuple<std::string, double, double, int>, std::pair<double, double>> sums;
  for (const auto& r : records) {
    if (!(r.count >= 0.0)) throw ValidationError(fmt::format("negative census count for area '{}' year {}", r.area, r.year));
    auto& s = sums[{r.area, r.age.lo, r.age.hi, r.year}];
    (r.group == "minority" ? s.first : s.second) += r.count;
  }
  for (const auto& [k, s] : sums) {
    if (s.first > s.second)
      throw ValidationError(fmt::format("minority count exceeds total for area '{}' age {:g}-{:g} year {}",
                                        std::get<0>(k), std::get<1>(k), std::get<2>(k), std::get<3>(k)));
  }
}

std::vector<AgeBin> CensusTable::age_groups() const {
  std::vector<AgeBin> out;
  for (const auto& r : records) {
    if (std::none_of(out.begin(), out.end(), [&](const AgeBin& a) { return same_bin(a, r.age); })) out.push_back(r.age);
  }
  std::sort(out.begin(), out.end(), [](const AgeBin& a, const AgeBin& b) { return a.lo < b.lo; });
  return out;
}

std::vector<int> CensusTable::years() const {
  std::set<int> s;
  for (const auto& r : records) s.insert(r.year);
  return {s.begin(), s.end()};
}

CensusTable interpolate_population(const CensusTable& census, const std::vector<int>& years) {
  using SeriesKey = std::tuple<std::string, double, double, std::string>;
  std::map<SeriesKey, std::map<int, double>> series;
  std::map<SeriesKey, AgeBin> ages;
  for (const auto& r : census.records) {
    const SeriesKey key{r.area, r.age.lo, r.age.hi, r.group};
    auto [it, inserted] = series[key].try_emplace(r.year, r.count);
    if (!inserted) throw ValidationError(fmt::format("duplicate census record for area '{}' age {} year {}", r.area, r.age.label(), r.year));
    ages[key] = r.age;
  }
  CensusTable out;
  out.warnings = census.warnings;
  for (const auto& [key, points] : series) {
    const auto& [area, lo, hi, group] = key;
    for (int year : years) {
      CensusRecord rec{area, year, ages[key], group, 0.0, Provenance::kAnchor};
      if (auto it = points.find(year); it != points.end()) {
        rec.count = it->second;
      } else if (points.size() == 1) {
        rec.count = points.begin()->second;
        rec.provenance = Provenance::kConstant;
        out.warnings.push_back(fmt::format("area '{}' age {} {}: single anchor year, {} held constant", area,
                                           rec.age.label(), group, year));
      } else {
        auto upper = points.upper_bound(year);
        if (upper == points.begin()) {
          ++upper;
        } else if (upper == points.end()) {
          --upper;
        }
        auto lower = std::prev(upper);
        const double t = static_cast<double>(year - lower->first) / static_cast<double>(upper->first - lower->first);
        rec.count = lower->second + t * (upper->second - lower->second);
        const bool outside = year < points.begin()->first || year > points.rbegin()->first;
        rec.provenance = outside ? Provenance::kExtrapolated : Provenance::kInterpolated;
        if (rec.count < 0.0) {
          out.warnings.push_back(fmt::format("area '{}' age {} {}: extrapolated {} count negative, set to 0", area,
                                             rec.age.label(), group, year));
          rec.count = 0.0;
        }
      }
      out.records.push_back(std::move(rec));
    }
  }
  return out;
}

AdmissionCounts AdmissionCounts::parse(std::string_view text, char delimiter) {
  const Table t = read_table(text, delimiter);
  const std::size_t ca = t.col("area"), cy = t.col("year"), clo = t.col("age_lo"), chi = t.col("age_hi"),
                    cg = t.col("group"), cd = t.col("diagnosis"), cn = t.col("n");
  AdmissionCounts out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const std::size_t line = i + 2;
    AdmissionRecord r;
    r.area = trim(row[ca]);
    r.year = to_year(row[cy], line);
    r.age = {to_number(row[clo], "age_lo", line), to_number(row[chi], "age_hi", line)};
    const std::string g = trim(row[cg]);
    if (g == "minority") {
      r.group = 0;
    } else if (g == "majority") {
      r.group = 1;
    } else {
      throw ValidationError(fmt::format("line {}: admission group must be minority or majority, found '{}'", line, g));
    }
    r.diagnosis = trim(row[cd]);
    r.n = to_number(row[cn], "n", line);
    if (r.n < 0.0) throw ValidationError(fmt::format("line {}: negative admission count", line));
    out.records.push_back(std::move(r));
  }
  return out;
}

AdmissionCounts AdmissionCounts::load(const std::string& path, char delimiter) {
  return parse(read_text_file(path), delimiter);
}

std::string AdmissionCounts::format(char delimiter) const {
  const char d = delimiter;
  std::string out = fmt::format("area{0}year{0}age_lo{0}age_hi{0}group{0}diagnosis{0}n\n", d);
  for (const auto& r : records) {
    out += fmt::format("{1}{0}{2}{0}{3:g}{0}{4:g}{0}{5}{0}{6}{0}{7:.17g}\n", d, quote_field(r.area, d), r.year, r.age.lo,
                       r.age.hi, r.group == 0 ? "minority" : "majority", quote_field(r.diagnosis, d), r.n);
  }
  return out;
}

std::vector<int> AdmissionCounts::years() const {
  std::set<int> s;
  for (const auto& r : records) s.insert(r.year);
  return {s.begin(), s.end()};
}

AdmissionCounts count_admissions(const SfmDataset& ds, const std::vector<AgeBin>& age_groups) {
  const auto& schema = ds.schema();
  if (!schema.age_column || !schema.year_column || !schema.admission_type_column)
    throw ConfigError("counting admissions needs age, year and admission type columns");
  const Column& age = ds.column(*schema.age_column);
  const Column& year = ds.column(*schema.year_column);
  const Column& type = ds.column(*schema.admission_type_column);
  const Column* area = schema.area_column ? &ds.column(*schema.area_column) : nullptr;
  if (age.kind != ColumnKind::kNumeric || year.kind != ColumnKind::kNumeric)
    throw ValidationError("age and year columns must be numeric");
  const auto x = ds.attribute();
  std::map<std::tuple<std::string, int, std::size_t, int, std::string>, double> counts;
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    if (x[r] < 0 || age.is_missing(r) || year.is_missing(r) || type.is_missing(r)) continue;
    std::size_t g = age_groups.size();
    for (std::size_t k = 0; k < age_groups.size(); ++k) {
      if (age_groups[k].contains(age.numeric[r])) {
        g = k;
        break;
      }
    }
    if (g == age_groups.size()) continue;
    const std::string a = area ? area->cell_text(r) : std::string{};
    counts[{a, static_cast<int>(year.numeric[r]), g, x[r], type.cell_text(r)}] += 1.0;
  }
  AdmissionCounts out;
  for (const auto& [k, n] : counts) {
    out.records.push_back({std::get<0>(k), std::get<1>(k), age_groups[std::get<2>(k)], std::get<3>(k), std::get<4>(k), n});
  }
  return out;
}

double admission_risk(const CensusTable& census, const AdmissionCounts& admissions, const RiskEvent& event, int group,
                      const std::vector<std::string>& diagnoses) {
  if (group != 0 && group != 1) throw ConfigError("group must be 0 (minority) or 1 (majority)");
  const auto cells = risk_cells(census, admissions, event, diagnoses);
  const double total = total_population(cells);
  check_population(cells, group);
  return mixed_risk(cells, group, total);
}

RiskRatio risk_ratio(const CensusTable& census, const AdmissionCounts& admissions, const RiskEvent& event,
                     const std::vector<std::string>& diagnoses, const RiskBootstrap& boot) {
  const auto cells = risk_cells(census, admissions, event, diagnoses);
  const double total = total_population(cells);
  check_population(cells, 0);
  check_population(cells, 1);
  RiskRatio res;
  res.risk[0] = mixed_risk(cells, 0, total);
  res.risk[1] = mixed_risk(cells, 1, total);
  if (!(res.risk[1] > 0.0)) throw DegenerateError("majority admission risk is zero; risk ratio undefined");
  res.rr = res.risk[0] / res.risk[1];
  res.ci = {kNaN, kNaN};
  std::vector<double> cum;
  for (const auto& c : cells) {
    for (int g = 0; g < 2; ++g) {
      res.admissions += c.n[g];
      cum.push_back(res.admissions);
    }
  }
  const auto m = static_cast<std::size_t>(std::llround(res.admissions));
  if (boot.replicates < 2 || m == 0 || !(res.rr > 0.0)) return res;
  std::vector<double> logs;
  std::vector<double> draw(cum.size());
  for (int b = 0; b < boot.replicates; ++b) {
    Rng rng(derive_seed(boot.seed, kRiskBootTag, static_cast<std::uint64_t>(b)));
    std::fill(draw.begin(), draw.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const double u = rng.uniform() * res.admissions;
      const auto k = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
      draw[std::min(k, draw.size() - 1)] += 1.0;
    }
    const double r0 = mixed_risk(cells, 0, total, draw.data());
    const double r1 = mixed_risk(cells, 1, total, draw.data());
    if (r0 > 0.0 && r1 > 0.0) logs.push_back(std::log(r0 / r1));
  }
  res.replicates = static_cast<int>(logs.size());
  if (logs.size() >= 2) {
    const double sd = sample_sd(logs);
    res.ci = {std::exp(std::log(res.rr) - kZ975 * sd), std::exp(std::log(res.rr) + kZ975 * sd)};
  }
  return res;
}

Heatmap rr_heatmap(const CensusTable& census, const AdmissionCounts& admissions, const CellGrid& grid,
                   const std::vector<int>& years, const std::optional<std::string>& area, const RiskBootstrap& boot) {
  Heatmap h = Heatmap::empty_for(grid);
  for (std::size_t b = 0; b < grid.rows(); ++b) {
    for (std::size_t t = 0; t < grid.cols(); ++t) {
      const std::size_t cell = h.index(b, t);
      RiskEvent event{grid.age_bins[b], years, area};
      RiskBootstrap cell_boot = boot;
      cell_boot.seed = derive_seed(boot.seed, kRiskBootTag, cell);
      try {
        const RiskRatio rr = risk_ratio(census, admissions, event, {grid.admission_types[t]}, cell_boot);
        h.value[cell] = rr.rr;
        h.ci_lo[cell] = rr.ci.lo;
        h.ci_hi[cell] = rr.ci.hi;
        h.n[cell] = static_cast<std::size_t>(std::llround(rr.admissions));
        h.masked[cell] = 0;
      } catch (const DegenerateError& e) {
        h.notes.push_back(fmt::format("cell {} x {} masked: {}", grid.age_bins[b].label(), grid.admission_types[t], e.what()));
      }
    }
  }
  return h;
}

std::string radar_category_name(RadarCategory c) {
  switch (c) {
    case RadarCategory::kNone: return "none";
    case RadarCategory::kModerate: return "moderate";
    case RadarCategory::kSubstantial: return "substantial";
    case RadarCategory::kSevere: return "severe";
    case RadarCategory::kExtreme: return "extreme";
  }
  return "none";
}

RadarCategory radar_category(double excess) {
  if (excess >= 2.0) return RadarCategory::kExtreme;
  if (excess >= 1.0) return RadarCategory::kSevere;
  if (excess >= 0.5) return RadarCategory::kSubstantial;
  if (excess >= 0.1) return RadarCategory::kModerate;
  return RadarCategory::kNone;
}

RadarTable build_radar(const CensusTable& census, const AdmissionCounts& admissions, const std::vector<int>& years,
                       const std::vector<std::string>& diagnoses) {
  std::set<std::string> areas;
  for (const auto& a : admissions.records) {
    if (!is_national(a.area)) areas.insert(a.area);
  }
  std::set<std::string> census_areas;
  for (const auto& r : census.records) census_areas.insert(r.area);
  RadarTable table;
  for (const auto& area : areas) {
    if (!census_areas.count(area)) {
      table.excluded.push_back(area + ": not in census");
      continue;
    }
    try {
      const RiskRatio rr = risk_ratio(census, admissions, {std::nullopt, years, area}, diagnoses, {0, 0});
      const double excess = rr.rr - 1.0;
      table.rows.push_back({area, rr.rr, excess, radar_category(excess)});
    } catch (const DegenerateError& e) {
      table.excluded.push_back(area + ": " + e.what());
    }
  }
  return table;
}

}  // namespace sfm
