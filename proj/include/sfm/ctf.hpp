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

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sfm/crossfit.hpp"
#include "sfm/dataset.hpp"
#include "sfm/stats.hpp"

namespace sfm {

// psi(a, b, c) = E[Y_{b, W_a} | X = c]; levels are 0 (x0) and 1 (x1).
struct CtfQuery {
  int a = 0;
  int b = 0;
  int c = 0;
  std::string outcome;  // empty: the outcome the fits were built for
};

struct CtfEstimate {
  double value = 0.0;
  std::vector<double> influence;  // centered, mean zero
  double se = 0.0;
  Interval ci95;
  bool truncated = false;

  // se = sd(influence) / sqrt(n), ci95 = value +/- z * se.
  static CtfEstimate from_influence(double value, std::vector<double> influence);
};

// sum_k weight_k * estimate_k, with influences combined row by row.
CtfEstimate combine(const std::vector<std::pair<double, const CtfEstimate*>>& terms);
CtfEstimate contrast(const CtfEstimate& lhs, const CtfEstimate& rhs);

struct EstimateOptions {
  // Clamp each psi to [0, 1]; clamps are counted.
  bool truncate = true;
};

CtfEstimate estimate_ctf_mean(const SfmDataset& ds, const NuisanceFits& fits, const CtfQuery& q,
                              const EstimateOptions& options = {});
// Mean of eta_{a,b}(Z) over rows with X = c.
double plugin_ctf_mean(const SfmDataset& ds, const NuisanceFits& fits, const CtfQuery& q);

// All eight arms, arm(a, b, c).
struct ArmTable {
  std::array<CtfEstimate, 8> psi;
  std::size_t truncations = 0;
  const CtfEstimate& arm(int a, int b, int c) const { return psi[static_cast<std::size_t>(a * 4 + b * 2 + c)]; }
};
ArmTable estimate_all_arms(const SfmDataset& ds, const NuisanceFits& fits, const EstimateOptions& options = {});

struct DecompositionMeta {
  std::string dataset_id;
  std::string learner;
  std::uint64_t seed = 0;
  int folds = 0;
  double clip = 0.0;
  std::size_t clipped = 0;
  std::size_t truncations = 0;
};

// tv = direct + indirect_negated + confounded_negated, each a difference of
// shared psi estimates. Forward orientation:
//   direct             = psi(0,1,0) - psi(0,0,0)
//   indirect_negated   = psi(1,1,0) - psi(0,1,0)
//   confounded_negated = psi(1,1,1) - psi(1,1,0)
// Reverse orientation (mediators switched first, still read x0 -> x1):
//   direct             = psi(1,1,0) - psi(1,0,0)
//   indirect_negated   = psi(1,0,0) - psi(0,0,0)
//   confounded_negated = psi(1,1,1) - psi(1,1,0)
struct TvDecomposition {
  bool reverse = false;
  CtfEstimate tv;
  CtfEstimate direct;
  CtfEstimate indirect_negated;
  CtfEstimate confounded_negated;
  std::size_t n_x0 = 0;
  std::size_t n_x1 = 0;
  DecompositionMeta meta;
};

TvDecomposition decompose_tv(const ArmTable& arms, std::size_t n_x0, std::size_t n_x1, bool reverse = false);
TvDecomposition decompose_tv(const SfmDataset& ds, const NuisanceFits& fits, const EstimateOptions& options = {});
TvDecomposition decompose_tv_reverse(const SfmDataset& ds, const NuisanceFits& fits,
                                     const EstimateOptions& options = {});

// Convenience: plan, fit and decompose in one call.
struct PipelineOptions {
  LearnerSpec spec;
  int folds = 5;
  std::uint64_t seed = 0;
  double clip = 0.01;
  EstimateOptions estimate;
};
NuisanceFits fit_for(const SfmDataset& ds, const PipelineOptions& options);

}  // namespace sfm
