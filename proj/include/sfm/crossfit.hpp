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
#include "sfm/learner.hpp"

namespace sfm {

// Fold assignment stratified by attribute level. Rows of each level are
// shuffled with a seeded RNG and dealt round-robin to folds.
struct CrossFitPlan {
  int requested_folds = 5;
  int folds = 5;
  std::uint64_t seed = 0;
  std::vector<int> fold_of;

  // Reduces the fold count (down to 2) until every fold is non-empty and
  // every training complement holds both attribute levels; throws
  // DegenerateError when even two folds fail.
  static CrossFitPlan make(std::span<const std::int8_t> attribute, int folds, std::uint64_t seed);
  std::vector<std::size_t> held_out(int fold) const;
  std::vector<std::size_t> training(int fold) const;
};

// Out-of-fold nuisance predictions, one entry per row. Index 0 is x0, 1 is x1.
struct NuisanceFits {
  std::vector<double> mu[2];      // E[Y | X=x, Z_i, W_i]
  std::vector<double> m[2];       // E[Y | X=x, Z_i]
  std::vector<double> pi0;        // P(X=x0 | Z_i), clipped
  std::vector<double> rho0;       // P(X=x0 | Z_i, W_i), clipped
  std::vector<double> rho0_raw;   // same, before clipping
  std::vector<double> eta[2][2];  // eta[a][b](Z_i) = E[mu(b, Z, W) | X=a, Z_i]

  CrossFitPlan plan;
  LearnerSpec spec;
  double clip = 0.01;
  std::size_t clipped = 0;  // probability predictions moved by clipping
  std::string outcome;
  std::string dataset_id;

  std::size_t n_rows() const { return pi0.size(); }
};

// Requires an observed attribute on every row (ValidationError otherwise).
NuisanceFits fit_crossfit(const SfmDataset& ds, const LearnerSpec& spec, const CrossFitPlan& plan,
                          double clip = 0.01);

// Rows `rows` of every prediction vector (fold bookkeeping is carried along).
NuisanceFits subset_fits(const NuisanceFits& fits, std::span<const std::size_t> rows);

// min(rho_x0, 1 - rho_x0) per row from the unclipped out-of-fold propensity.
std::vector<double> predict_min_propensity(const NuisanceFits& fits);

}  // namespace sfm
