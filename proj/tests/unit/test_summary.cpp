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

#include "sfm/dataset.hpp"
#include "sfm/stats.hpp"
#include "sfm/summary.hpp"

using namespace sfm;

TEST_CASE("cohort characteristics by group") {
  RoleSchema s;
  s.attribute_column = "g";
  s.minority_level = "m";
  s.majority_level = "M";
  s.confounder_columns = {"age", "sex"};
  s.outcome_column = "y";
  const SfmDataset ds = parse_dataset(
      "g,age,sex,y\n"
      "m,20,F,0\nm,30,F,1\nm,40,M,0\nm,NA,M,1\n"
      "M,50,F,0\nM,60,M,0\nM,70,M,1\n,80,F,0\n",
      s);
  const CohortSummary sum = summarize_cohort(ds, {"age", "sex", "y"});
  CHECK(sum.groups[0].n == 4);
  CHECK(sum.groups[1].n == 3);
  CHECK(sum.groups[0].percent == doctest::Approx(100.0 * 4 / 7));
  CHECK(sum.attribute_missing == 1);
  REQUIRE(sum.variables.size() == 3);

  const auto& age = sum.variables[0];
  CHECK(age.test == "rank-sum");
  CHECK(age.numeric[0].n == 3);
  CHECK(age.numeric[0].median == 30);
  CHECK(age.numeric[1].mean == 60);
  const std::vector<double> a = {20, 30, 40}, b = {50, 60, 70};
  CHECK(age.p_value == doctest::Approx(rank_sum_test(a, b).p_value));

  const auto& sex = sum.variables[1];
  CHECK(sex.test == "chi-square");
  REQUIRE(sex.levels.size() == 2);
  CHECK(sex.levels[0].level == "F");
  CHECK(sex.levels[0].count[0] == 2);
  CHECK(sex.levels[0].count[1] == 1);
  CHECK(sex.levels[0].percent[0] == doctest::Approx(50.0));
  CHECK(sex.p_value == doctest::Approx(chi_square_independence({{2, 1}, {2, 2}}).p_value));
}
