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

#include <doctest.h>

#include <cmath>

#include "sfm/dataset.hpp"
#include "sfm/error.hpp"
#include "sfm/popn_risk.hpp"

using namespace sfm;

namespace {

const std::string kDir = std::string(SFM_FIXTURES) + "/popn/";

CensusTable census() { return CensusTable::load(kDir + "census.csv"); }
AdmissionCounts admissions() { return AdmissionCounts::load(kDir + "admissions.csv"); }

// Per-cell (minority pop, total pop, minority n, majority n).
struct Cell {
  double min_pop, total, n_min, n_maj;
};

double weighted(const std::vector<Cell>& cells, int group) {
  double total = 0.0;
  for (const auto& c : cells) total += c.total;
  double r = 0.0;
  for (const auto& c : cells) {
    const double pop = group == 0 ? c.min_pop : c.total - c.min_pop;
    r += c.total / total * (group == 0 ? c.n_min : c.n_maj) / pop;
  }
  return r;
}

}  // namespace

TEST_CASE("fixture area risks match the hand formula") {
  const auto cen = census();
  const auto adm = admissions();
  const std::vector<Cell> a = {{1000, 10000, 40, 99}, {500, 5000, 20, 45}};
  const std::vector<Cell> a_med = {{1000, 10000, 30, 90}, {500, 5000, 20, 45}};
  const RiskEvent ea{std::nullopt, {2020}, std::string("A")};
  CHECK(std::abs(admission_risk(cen, adm, ea, 0) - weighted(a, 0)) <= 1e-12);
  CHECK(std::abs(admission_risk(cen, adm, ea, 1) - weighted(a, 1)) <= 1e-12);
  CHECK(std::abs(admission_risk(cen, adm, ea, 0, {"Medical"}) - weighted(a_med, 0)) <= 1e-12);

  const RiskRatio rr = risk_ratio(cen, adm, ea, {"Medical"}, {0, 0});
  CHECK(std::abs(rr.rr - weighted(a_med, 0) / weighted(a_med, 1)) <= 1e-12);
  CHECK(std::abs(rr.rr - 10.0 / 3.0) <= 1e-12);
  CHECK(rr.admissions == 185);
}

TEST_CASE("whole-table risk sums areas per age cell") {
  const std::vector<Cell> all = {{3500, 23000, 40 + 24 + 5, 99 + 60 + 45}, {2000, 14000, 20 + 12 + 4, 45 + 30 + 45}};
  const RiskEvent e{std::nullopt, {}, std::nullopt};
  const RiskRatio rr = risk_ratio(census(), admissions(), e, {}, {0, 0});
  CHECK(std::abs(rr.rr - weighted(all, 0) / weighted(all, 1)) <= 1e-12);
  const RiskEvent young{AgeBin{18, 49}, {2020}, std::nullopt};
  const double r = admission_risk(census(), admissions(), young, 0);
  CHECK(std::abs(r - 69.0 / 3500.0) <= 1e-12);
}

TEST_CASE("national records take precedence when present") {
  CensusTable cen = census();
  cen.records.push_back({"national", 2020, {18, 49}, "minority", 100, Provenance::kAnchor});
  cen.records.push_back({"national", 2020, {18, 49}, "total", 1000, Provenance::kAnchor});
  const RiskEvent e{AgeBin{18, 49}, {2020}, std::nullopt};
  CHECK(std::abs(admission_risk(cen, admissions(), e, 0) - 69.0 / 100.0) <= 1e-12);
}

TEST_CASE("risk-ratio heatmap cells") {
  CellGrid grid{{{18, 49}, {50, 64}}, {"Medical", "Surgery-Elective"}};
  const Heatmap h = rr_heatmap(census(), admissions(), grid, {2020}, std::string("A"), {0, 0});
  CHECK(std::abs(h.value[h.index(0, 0)] - (30.0 / 1000) / (90.0 / 9000)) <= 1e-12);
  CHECK(std::abs(h.value[h.index(1, 0)] - (20.0 / 500) / (45.0 / 4500)) <= 1e-12);
  CHECK(std::abs(h.value[h.index(0, 1)] - (10.0 / 1000) / (9.0 / 9000)) <= 1e-12);
  CHECK(h.masked[h.index(1, 1)] == 1);  // no elective admissions aged 50-64
  CHECK(h.n[h.index(0, 0)] == 120);
}

TEST_CASE("radar on the three-area fixture") {
  const RadarTable t = build_radar(census(), admissions(), {2020});
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[0].area == "A");
  CHECK(t.rows[0].category == RadarCategory::kExtreme);
  CHECK(t.rows[1].area == "B");
  CHECK(std::abs(t.rows[1].rr - 1.2) <= 1e-12);
  CHECK(t.rows[1].category == RadarCategory::kModerate);
  CHECK(t.rows[2].area == "C");
  CHECK(std::abs(t.rows[2].rr - 0.9) <= 1e-12);
  CHECK(t.rows[2].category == RadarCategory::kNone);
  CHECK(std::abs(t.rows[2].excess + 0.1) <= 1e-12);
}

TEST_CASE("radar thresholds, eight boundary points") {
  CHECK(radar_category(0.0999999) == RadarCategory::kNone);
  CHECK(radar_category(0.1) == RadarCategory::kModerate);
  CHECK(radar_category(0.4999999) == RadarCategory::kModerate);
  CHECK(radar_category(0.5) == RadarCategory::kSubstantial);
  CHECK(radar_category(0.9999999) == RadarCategory::kSubstantial);
  CHECK(radar_category(1.0) == RadarCategory::kSevere);
  CHECK(radar_category(1.9999999) == RadarCategory::kSevere);
  CHECK(radar_category(2.0) == RadarCategory::kExtreme);
  CHECK(radar_category_name(RadarCategory::kSubstantial) == "substantial");
}

TEST_CASE("bootstrap interval on log risk ratio") {
  const RiskEvent e{std::nullopt, {2020}, std::string("B")};
  const RiskRatio rr = risk_ratio(census(), admissions(), e, {}, {300, 5});
  CHECK(rr.replicates == 300);
  CHECK(rr.ci.lo < rr.rr);
  CHECK(rr.ci.hi > rr.rr);
  // Symmetric on the log scale.
  CHECK(std::log(rr.rr) - std::log(rr.ci.lo) == doctest::Approx(std::log(rr.ci.hi) - std::log(rr.rr)));
  const RiskRatio again = risk_ratio(census(), admissions(), e, {}, {300, 5});
  CHECK(again.ci.lo == rr.ci.lo);
}

TEST_CASE("interpolation between anchors, extrapolation and constants") {
  const CensusTable cen = CensusTable::parse(
      "area,year,age_lo,age_hi,group,count\n"
      "A,2010,18,49,total,1000\nA,2020,18,49,total,2000\n"
      "A,2010,18,49,minority,100\nA,2020,18,49,minority,50\n"
      "B,2016,18,49,total,700\n");
  const CensusTable out = interpolate_population(cen, {2014, 2020, 2026, 2050});
  auto find = [&](const std::string& area, const std::string& g, int y) {
    for (const auto& r : out.records) {
      if (r.area == area && r.group == g && r.year == y) return r;
    }
    FAIL("missing record");
    return CensusRecord{};
  };
  CHECK(find("A", "total", 2014).count == doctest::Approx(1400));
  CHECK(find("A", "total", 2014).provenance == Provenance::kInterpolated);
  CHECK(find("A", "total", 2020).provenance == Provenance::kAnchor);
  CHECK(find("A", "total", 2026).count == doctest::Approx(2600));
  CHECK(find("A", "total", 2026).provenance == Provenance::kExtrapolated);
  CHECK(find("A", "minority", 2050).count == 0.0);  // negative extrapolation clamped
  CHECK(find("B", "total", 2050).count == 700);
  CHECK(find("B", "total", 2050).provenance == Provenance::kConstant);
  CHECK(out.warnings.size() >= 2);
  // formatted output parses back
  CHECK(CensusTable::parse(out.format()).records.size() == out.records.size());
}

TEST_CASE("configuration and degeneracy errors") {
  const RiskEvent straddle{AgeBin{18, 60}, {2020}, std::nullopt};
  CHECK_THROWS_AS(admission_risk(census(), admissions(), straddle, 0), ConfigError);
  const RiskEvent missing_year{std::nullopt, {2021}, std::nullopt};
  CHECK_THROWS_AS(admission_risk(census(), admissions(), missing_year, 0), ConfigError);
  CHECK_THROWS_AS(CensusTable::parse("area,year,age_lo,age_hi,group,count\nA,2020,18,49,minority,-1\n").validate(),
                  ValidationError);
  CHECK_THROWS(CensusTable::parse("area,year\nA,2020\n"));
  const RiskEvent elective_c{std::nullopt, {2020}, std::string("C")};
  CHECK_THROWS_AS(risk_ratio(census(), admissions(), elective_c, {"Surgery-Elective"}), DegenerateError);
}

TEST_CASE("admission counts from a dataset") {
  RoleSchema s;
  s.attribute_column = "g";
  s.minority_level = "m";
  s.majority_level = "M";
  s.confounder_columns = {"age"};
  s.mediator_columns = {"type"};
  s.outcome_column = "y";
  s.age_column = "age";
  s.admission_type_column = "type";
  s.year_column = "year";
  const SfmDataset ds = parse_dataset(
      "g,age,type,y,year\nm,20,Medical,0,2020\nm,25,Medical,1,2020\nM,60,Medical,0,2020\n,30,Medical,0,2020\n"
      "M,10,Medical,0,2020\n",
      s);
  const AdmissionCounts c = count_admissions(ds, {{18, 49}, {50, 64}});
  double minority = 0.0, majority = 0.0;
  for (const auto& r : c.records) (r.group == 0 ? minority : majority) += r.n;
  CHECK(minority == 2);
  CHECK(majority == 1);
  CHECK(c.years() == std::vector<int>{2020});
  CHECK(AdmissionCounts::parse(c.format()).records.size() == c.records.size());
}
