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

#include <omp.h>

#include <cmath>

#include "sfm/dataset.hpp"
#include "sfm/error.hpp"
#include "spec_gen.hpp"

using namespace sfm;

TEST_CASE("json round trip") {
  const ScmSpec s = testing::demo_spec();
  const ScmSpec back = ScmSpec::from_json(s.to_json());
  CHECK(back.to_json() == s.to_json());
  CHECK(back.schema().age_column == std::optional<std::string>("age"));
  CHECK(back.schema().admission_type_column == std::optional<std::string>("admission_type"));
  CHECK_THROWS_AS(ScmSpec::from_json(nlohmann::json{{"latent", {1.0}}}), ConfigError);
  CHECK_THROWS_AS(ScmSpec::load("/nonexistent/spec.json"), IoError);
}

TEST_CASE("validation") {
  ScmSpec s = testing::demo_spec();
  s.p_x1 = {0.5};
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = testing::demo_spec();
  s.additive = true;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = testing::demo_spec();
  s.outcome_link = Link::kIdentity;
  s.outcome_index.base = 0.9;
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("oracle telescopes and matches its own definitions") {
  Rng rng(41);
  for (int i = 0; i < 5; ++i) {
    const ScmSpec s = testing::random_spec(rng, {}, "o");
    const OracleEffects o = oracle_effects(s);
    CHECK(std::abs(o.direct + o.indirect_negated + o.confounded_negated - o.tv) < 1e-12);
    CHECK(std::abs(o.direct_rev + o.indirect_rev + o.confounded_rev - o.tv) < 1e-12);
    CHECK(o.direct == doctest::Approx(o.arm(0, 1, 0) - o.arm(0, 0, 0)));
    CHECK(o.direct_rev == doctest::Approx(o.arm(1, 1, 0) - o.arm(1, 0, 0)));
    CHECK(o.tv == doctest::Approx(o.arm(1, 1, 1) - o.arm(0, 0, 0)));
  }
}

TEST_CASE("oracle agrees with sampled counterfactuals") {
  Rng rng(42);
  const ScmSpec s = testing::random_spec(rng, {}, "mc");
  const OracleEffects o = oracle_effects(s);
  const ScmSample sample = sample_units(s, 200000, 9);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int c = 0; c < 2; ++c) CHECK(empirical_ctf(s, sample, a, b, c) == doctest::Approx(o.arm(a, b, c)).epsilon(0.01));
    }
  }
  double x1 = 0.0;
  for (auto v : sample.x) x1 += v;
  CHECK(x1 / 200000.0 == doctest::Approx(o.p_x1).epsilon(0.01));
}

TEST_CASE("structural nulls are exact at the oracle") {
  Rng rng(43);
  testing::SpecShape no_direct;
  no_direct.direct = false;
  testing::SpecShape no_indirect;
  no_indirect.indirect = false;
  testing::SpecShape no_conf;
  no_conf.confounded = false;
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(oracle_effects(testing::random_spec(rng, no_direct, "d")).direct) < 1e-12);
    CHECK(std::abs(oracle_effects(testing::random_spec(rng, no_indirect, "i")).indirect_negated) < 1e-12);
    CHECK(std::abs(oracle_effects(testing::random_spec(rng, no_conf, "c")).confounded_negated) < 1e-12);
  }
}

TEST_CASE("sampling is deterministic across thread counts") {
  const ScmSpec s = testing::demo_spec();
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const std::string a = format_dataset(sample_dataset(s, 10000, 5));
  omp_set_num_threads(4);
  const std::string b = format_dataset(sample_dataset(s, 10000, 5));
  omp_set_num_threads(saved);
  CHECK(a == b);
  CHECK(a != format_dataset(sample_dataset(s, 10000, 6)));
  CHECK(sample_dataset(s, 0, 1).n_rows() == 0);
}

TEST_CASE("sampled datasets carry the roles and labels") {
  const ScmSpec s = testing::demo_spec();
  const SfmDataset ds = sample_dataset(s, 500, 1);
  CHECK(ds.id() == "demo:n=500:seed=1");
  CHECK(ds.column("age").kind == ColumnKind::kNumeric);
  CHECK(ds.column("admission_type").kind == ColumnKind::kCategorical);
  CHECK(ds.schema().minority_level == "minority");
  CHECK(ds.attribute_missing_count() == 0);
}

TEST_CASE("cell oracles weight by x0 mass") {
  const ScmSpec s = testing::demo_spec();
  const CellGrid g{CellGrid::default_effect_bins(), CellGrid::default_admission_types()};
  const OracleEffects o = oracle_effects(s, &g);
  REQUIRE(o.de_cells.size() == 12);
  REQUIRE(o.ie_bins.size() == 4);
  double mass = 0.0, weighted = 0.0;
  for (std::size_t c = 0; c < 12; ++c) {
    mass += o.de_cell_mass[c];
    if (o.de_cell_mass[c] > 0) weighted += o.de_cell_mass[c] * o.de_cells[c];
  }
  CHECK(mass == doctest::Approx(1.0 - o.p_x1));
  // E[Y_{x1,W} - Y | x0] = psi(0,1,0) - psi(0,0,0).
  CHECK(weighted / mass == doctest::Approx(o.direct).epsilon(1e-12));
  Rng rng(1);
  const ScmSpec plain = testing::random_spec(rng, {}, "plain");
  CHECK_THROWS_AS(oracle_effects(plain, &g), ConfigError);
}
