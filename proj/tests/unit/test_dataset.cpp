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

#include "sfm/config.hpp"
#include "sfm/dataset.hpp"
#include "sfm/error.hpp"

using namespace sfm;

namespace {

RoleSchema small_schema() {
  RoleSchema s;
  s.attribute_column = "group";
  s.minority_level = "min";
  s.majority_level = "maj";
  s.confounder_columns = {"age", "sex"};
  s.mediator_columns = {"adm"};
  s.outcome_column = "y";
  return s;
}

const char* kText =
    "group,age,sex,adm,y\n"
    "min,40,F,Medical,0\n"
    "maj,55,M,\"Surgery, urgent\",1\n"
    ",61,NA,Medical,0\n"
    "maj,70,F,Medical,\n"
    "min,NA,M,Medical,1\n";

}  // namespace

TEST_CASE("parse keeps missing attribute and drops missing outcome") {
  const SfmDataset ds = parse_dataset(kText, small_schema());
  CHECK(ds.n_rows() == 4);
  CHECK(ds.rejected_rows() == 1);
  CHECK(ds.attribute_missing_count() == 1);
  const auto x = ds.attribute();
  CHECK(x == std::vector<std::int8_t>{0, 1, -1, 0});
  CHECK(ds.complete_attribute().n_rows() == 3);

  const Column& age = ds.column("age");
  CHECK(age.kind == ColumnKind::kNumeric);
  CHECK(age.is_missing(3));
  CHECK(std::isnan(age.numeric[3]));

  const Column& adm = ds.column("adm");
  CHECK(adm.kind == ColumnKind::kCategorical);
  CHECK(adm.levels == std::vector<std::string>{"Medical", "Surgery, urgent"});
  CHECK(ds.column("sex").is_missing(2));
  CHECK(ds.outcome() == std::vector<double>{0, 1, 0, 1});
}

TEST_CASE("format and parse round trip") {
  const SfmDataset ds = parse_dataset(kText, small_schema());
  const std::string text = format_dataset(ds);
  const SfmDataset again = parse_dataset(text, small_schema());
  CHECK(format_dataset(again) == text);
  CHECK(again.column("adm").cell_text(1) == "Surgery, urgent");
}

TEST_CASE("validation failures") {
  CHECK_THROWS_AS(parse_dataset("group,age,sex,adm,y\nmin,1,F,M,2\n", small_schema()), ValidationError);
  CHECK_THROWS_AS(parse_dataset("group,age,sex,adm,y\nother,1,F,M,1\n", small_schema()), ValidationError);
  CHECK_THROWS_AS(parse_dataset("group,age,adm,y\nmin,1,M,1\n", small_schema()), SchemaError);
  CHECK_THROWS_AS(parse_dataset("group,age,sex,adm,y\nmin,1,F\n", small_schema()), ValidationError);
  CHECK_THROWS_AS(load_dataset("/nonexistent/file.csv", small_schema()), IoError);

  RoleSchema bad = small_schema();
  bad.mediator_columns = {"age"};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = small_schema();
  bad.majority_level = "min";
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("delimited splitting") {
  const auto rec = split_records("a,\"b,c\",\"d\"\"e\"\n\n1,2,3\n", ',');
  REQUIRE(rec.size() == 2);
  CHECK(rec[0] == std::vector<std::string>{"a", "b,c", "d\"e"});
  CHECK(quote_field("x,y", ',') == "\"x,y\"");
  CHECK(quote_field("plain", ',') == "plain");
}

TEST_CASE("categorical override and sentinels") {
  LoadOptions opt;
  opt.categorical = {"age"};
  const SfmDataset ds = parse_dataset(kText, small_schema(), opt);
  CHECK(ds.column("age").kind == ColumnKind::kCategorical);
  opt = {};
  opt.sentinels["age"] = -9;
  CHECK(parse_dataset(kText, small_schema(), opt).sentinel("age") == -9);
}

TEST_CASE("subset, attribute swap and alternative outcome") {
  RoleSchema s = small_schema();
  s.readmission_column = "r";
  const SfmDataset ds = parse_dataset("group,age,sex,adm,y,r\nmin,1,F,A,0,1\nmaj,2,M,B,1,\nmin,3,F,A,1,0\n", s);
  const std::vector<std::size_t> rows = {2, 0};
  const SfmDataset sub = ds.subset(rows);
  CHECK(sub.column("age").numeric == std::vector<double>{3, 1});
  const std::vector<std::int8_t> flip = {1, 0, 1};
  CHECK(ds.with_attribute(flip).attribute() == flip);
  const SfmDataset re = ds.with_outcome("r");
  CHECK(re.n_rows() == 2);
  CHECK(re.outcome() == std::vector<double>{1, 0});
}

TEST_CASE("filter rules and exclusion log") {
  const SfmDataset ds = parse_dataset(kText, small_schema());
  const std::vector<FilterRule> rules = {FilterRule::parse("age >= 50"), FilterRule::parse("sex in {F,M}")};
  const FilterResult r = filter_cohort(ds, rules);
  REQUIRE(r.log.size() == 2);
  CHECK(r.log[0].removed == 2);  // age 40 and missing age
  CHECK(r.log[0].remaining == 2);
  CHECK(r.log[1].removed == 1);  // missing sex
  CHECK(r.dataset.n_rows() == 1);

  CHECK(FilterRule::parse("age in 18..100").keeps(ds.column("age"), 0));
  CHECK_FALSE(FilterRule::parse("age < 40").keeps(ds.column("age"), 0));
  CHECK(FilterRule::parse("sex present").keeps(ds.column("sex"), 0));
  CHECK_THROWS_AS(FilterRule::parse("age ~ 3"), ConfigError);
  const std::vector<FilterRule> unknown = {FilterRule::parse("height > 1")};
  CHECK_THROWS_AS(filter_cohort(ds, unknown), SchemaError);
}

TEST_CASE("ini config and schema round trip") {
  const IniConfig cfg = IniConfig::parse(
      "# roles\n[columns]\nattribute = group\nminority = min\nmajority = maj\n"
      "confounders = age, sex\nmediators = adm\noutcome = y\nage = age\n"
      "sentinel.age = -5\n[run]\nseed = 4\n");
  CHECK(cfg.get("run", "seed") == std::optional<std::string>("4"));
  CHECK(cfg.get_or("run", "folds", "5") == "5");
  const RoleSchema s = schema_from_config(cfg);
  CHECK(s.confounder_columns == std::vector<std::string>{"age", "sex"});
  CHECK(s.age_column == std::optional<std::string>("age"));
  CHECK(load_options_from_config(cfg).sentinels.at("age") == -5);

  IniConfig out;
  schema_to_config(s, out);
  const RoleSchema back = schema_from_config(IniConfig::parse(out.to_string()));
  CHECK(back.referenced_columns() == s.referenced_columns());
  CHECK(back.minority_level == "min");

  CHECK_THROWS_AS(schema_from_config(IniConfig::parse("[columns]\nattribute = g\n")), ConfigError);
  CHECK(split_list(" a, b ,,c ") == std::vector<std::string>{"a", "b", "c"});
}
