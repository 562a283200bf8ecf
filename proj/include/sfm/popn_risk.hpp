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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sfm/dataset.hpp"
#include "sfm/heatmap.hpp"
#include "sfm/stats.hpp"

namespace sfm {

enum class Provenance { kAnchor, kInterpolated, kExtrapolated, kConstant };
std::string provenance_name(Provenance p);

// One census count. `group` is "minority" or "total"; an empty area means the
// record is national.
struct CensusRecord {
  std::string area;
  int year = 0;
  AgeBin age;
  std::string group;
  double count = 0.0;
  Provenance provenance = Provenance::kAnchor;
};

struct CensusTable {
  std::vector<CensusRecord> records;
  std::vector<std::string> warnings;

  // Columns area, year, age_lo, age_hi, group, count (any order).
  static CensusTable parse(std::string_view text, char delimiter = ',');
  static CensusTable load(const std::string& path, char delimiter = ',');
  std::string format(char delimiter = ',') const;
  // counts >= 0 and minority <= total for every (area, year, age).
  void validate() const;
  std::vector<AgeBin> age_groups() const;
  std::vector<int> years() const;
};

// Linear interpolation per (area, age, group) between anchor years; linear
// continuation of the nearest segment outside the anchors (flagged); a single
// anchor is carried as a constant with a warning.
CensusTable interpolate_population(const CensusTable& census, const std::vector<int>& years);

// Admissions per (area, year, age group, group, diagnosis). group 0 is the
// minority, 1 the majority.
struct AdmissionRecord {
  std::string area;
  int year = 0;
  AgeBin age;
  int group = 0;
  std::string diagnosis;
  double n = 0.0;
};

struct AdmissionCounts {
  std::vector<AdmissionRecord> records;

  // Columns area, year, age_lo, age_hi, group (minority|majority), diagnosis, n.
  static AdmissionCounts parse(std::string_view text, char delimiter = ',');
  static AdmissionCounts load(const std::string& path, char delimiter = ',');
  std::string format(char delimiter = ',') const;
  std::vector<int> years() const;
};

// One admission per dataset row with an observed attribute, binned into
// `age_groups` (rows outside every group are skipped). Needs age, year and
// admission type columns; the area column is optional.
AdmissionCounts count_admissions(const SfmDataset& ds, const std::vector<AgeBin>& age_groups);

// Event E: census age groups inside `age` (all when unset), the listed years
// (all census years when empty), one area or the whole table.
struct RiskEvent {
  std::optional<AgeBin> age;
  std::vector<int> years;
  std::optional<std::string> area;
};

// sum over cells (a, t) in E of w(a, t) * n_g(a, t) / N_g(a, t), with
// w proportional to the total population and N_majority = total - minority.
// An empty diagnosis list pools all diagnoses.
double admission_risk(const CensusTable& census, const AdmissionCounts& admissions, const RiskEvent& event,
                      int group, const std::vector<std::string>& diagnoses = {});

struct RiskBootstrap {
  int replicates = 200;
  std::uint64_t seed = 0;
};

struct RiskRatio {
  double rr = 0.0;
  double risk[2] = {0.0, 0.0};
  Interval ci;
  double admissions = 0.0;
  int replicates = 0;
};

// Minority over majority risk. CI from a multinomial bootstrap of the
// admissions in E, Gaussian on log RR.
RiskRatio risk_ratio(const CensusTable& census, const AdmissionCounts& admissions, const RiskEvent& event,
                     const std::vector<std::string>& diagnoses = {}, const RiskBootstrap& boot = {});

// Per-cell risk ratio: age bin x diagnosis (admission type).
Heatmap rr_heatmap(const CensusTable& census, const AdmissionCounts& admissions, const CellGrid& grid,
                   const std::vector<int>& years = {}, const std::optional<std::string>& area = std::nullopt,
                   const RiskBootstrap& boot = {});

enum class RadarCategory { kNone, kModerate, kSubstantial, kSevere, kExtreme };
std::string radar_category_name(RadarCategory c);
// Excess RR thresholds 0.10, 0.50, 1.00, 2.00 (lower bounds inclusive).
RadarCategory radar_category(double excess);

struct RadarRow {
  std::string area;
  double rr = 0.0;
  double excess = 0.0;
  RadarCategory category = RadarCategory::kNone;
};

struct RadarTable {
  std::vector<RadarRow> rows;
  std::vector<std::string> excluded;  // "area: reason"
};

// Age-adjusted RR per area over all census age groups, diagnoses pooled
// unless `diagnoses` is given. Areas are reported in sorted order.
RadarTable build_radar(const CensusTable& census, const AdmissionCounts& admissions, const std::vector<int>& years = {},
                       const std::vector<std::string>& diagnoses = {});

}  // namespace sfm
