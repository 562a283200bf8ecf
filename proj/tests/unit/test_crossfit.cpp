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

#include <algorithm>
#include <set>

#include "sfm/crossfit.hpp"
#include "sfm/error.hpp"
#include "spec_gen.hpp"

using namespace sfm;

TEST_CASE("folds are stratified and balanced") {
  std::vector<std::int8_t> x(103, 0);
  for (std::size_t i = 0; i < 41; ++i) x[i * 2] = 1;
  const auto plan = CrossFitPlan::make(x, 5, 11);
  CHECK(plan.folds == 5);
  std::vector<int> per_level[2] = {std::vector<int>(5, 0), std::vector<int>(5, 0)};
  for (std::size_t r = 0; r < x.size(); ++r) ++per_level[x[r]][static_cast<std::size_t>(plan.fold_of[r])];
  for (int l = 0; l < 2; ++l) {
    const auto [lo, hi] = std::minmax_element(per_level[l].begin(), per_level[l].end());
    CHECK(*hi - *lo <= 1);
  }
  for (int k = 0; k < 5; ++k) {
    const auto held = plan.held_out(k);
    const auto train = plan.training(k);
    CHECK(held.size() + train.size() == x.size());
    std::set<std::size_t> seen(held.begin(), held.end());
    for (auto r : train) CHECK(seen.count(r) == 0);
  }
  CHECK(CrossFitPlan::make(x, 5, 11).fold_of == plan.fold_of);
  CHECK(CrossFitPlan::make(x, 5, 12).fold_of != plan.fold_of);
}

TEST_CASE("fold count shrinks until both levels train in every fold") {
  const std::vector<std::int8_t> x = {0, 0, 1, 1};
  const auto plan = CrossFitPlan::make(x, 5, 1);
  CHECK(plan.requested_folds == 5);
  CHECK(plan.folds == 4);
  const std::vector<std::int8_t> lone = {0, 0, 0, 0, 1};
  CHECK_THROWS_AS(CrossFitPlan::make(lone, 5, 1), DegenerateError);
  const std::vector<std::int8_t> missing = {0, 1, -1, 0};
  CHECK_THROWS_AS(CrossFitPlan::make(missing, 2, 1), ValidationError);
  CHECK_THROWS_AS(CrossFitPlan::make(x, 1, 1), ConfigError);
}

TEST_CASE("cross-fitted nuisances: shapes, clipping and subsets") {
  Rng rng(2);
  const ScmSpec spec = testing::random_spec(rng, {}, "cf");
  const SfmDataset ds = sample_dataset(spec, 3000, 5);
  LearnerSpec learner;
  learner.trees = 40;
  const auto plan = CrossFitPlan::make(ds.attribute(), 4, 9);
  const NuisanceFits f = fit_crossfit(ds, learner, plan, 0.2);
  CHECK(f.n_rows() == ds.n_rows());
  std::size_t moved = 0;
  for (std::size_t r = 0; r < f.n_rows(); ++r) {
    CHECK(f.pi0[r] >= 0.2);
    CHECK(f.pi0[r] <= 0.8);
    CHECK(f.rho0[r] >= 0.2);
    CHECK(f.rho0[r] <= 0.8);
    if (f.rho0_raw[r] != f.rho0[r]) ++moved;
    for (int a = 0; a < 2; ++a) {
      CHECK(f.eta[a][a][r] == f.m[a][r]);
    }
  }
  CHECK(moved > 0);
  CHECK(f.clipped >= moved);
  CHECK(f.dataset_id == ds.id());

  const std::vector<std::size_t> rows = {5, 1, 5};
  const NuisanceFits s = subset_fits(f, rows);
  CHECK(s.n_rows() == 3);
  CHECK(s.mu[1][0] == f.mu[1][5]);
  CHECK(s.eta[0][1][1] == f.eta[0][1][1]);
  CHECK(s.plan.fold_of[2] == f.plan.fold_of[5]);

  const auto e = predict_min_propensity(f);
  for (std::size_t r = 0; r < e.size(); ++r) CHECK(e[r] == std::min(f.rho0_raw[r], 1 - f.rho0_raw[r]));
}

TEST_CASE("out-of-fold predictions ignore the held-out outcomes") {
  Rng rng(3);
  const ScmSpec spec = testing::random_spec(rng, {}, "oof");
  const SfmDataset ds = sample_dataset(spec, 2000, 7);
  LearnerSpec learner;
  learner.trees = 20;
  const auto plan = CrossFitPlan::make(ds.attribute(), 2, 1);
  const NuisanceFits base = fit_crossfit(ds, learner, plan);

  // Flip outcomes in fold 0; predictions for fold-0 rows must not move.
  std::vector<double> y = ds.outcome();
  std::vector<Column> cols = ds.columns();
  for (auto& c : cols) {
    if (c.name != spec.outcome) continue;
    for (std::size_t r = 0; r < y.size(); ++r) {
      if (plan.fold_of[r] == 0) c.numeric[r] = 1.0 - c.numeric[r];
    }
  }
  const SfmDataset flipped(ds.schema(), cols, ds.options(), ds.id());
  const NuisanceFits other = fit_crossfit(flipped, learner, plan);
  for (auto r : plan.held_out(0)) {
    CHECK(other.mu[0][r] == base.mu[0][r]);
    CHECK(other.eta[1][0][r] == base.eta[1][0][r]);
  }
}
