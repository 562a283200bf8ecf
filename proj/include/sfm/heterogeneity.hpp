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
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "sfm/crossfit.hpp"
#include "sfm/dataset.hpp"
#include "sfm/heatmap.hpp"
#include "sfm/stats.hpp"

namespace sfm {

inline constexpr std::size_t kCellFloor = 50;

struct CellBootstrap {
  int replicates = 200;
  std::uint64_t seed = 0;
  std::size_t floor = kCellFloor;  // cells with fewer x0 rows are masked
};

// Direct effect E[Y_{x1, W} - Y | X = x0, cell] per age x admission cell.
// Each x0 row contributes mu(x1, Z, W) - Y and each x1 row in the cell
// contributes rho_x0/rho_x1 * (Y - mu(x1, Z, W)); the cell sum is divided by
// the cell's x0 count. CIs bootstrap rows over the fixed contributions.
Heatmap conditional_direct_effect(const SfmDataset& ds, const NuisanceFits& fits, const CellGrid& grid,
                                  const CellBootstrap& boot = {});

struct BinEstimate {
  AgeBin bin;
  double value = 0.0;
  Interval ci;
  std::size_t n = 0;
  bool masked = false;
};

// psi(x1, x1, x0) - psi(x0, x1, x0) restricted to an age bin. Age must be a
// confounder so the pseudo-outcomes stay valid within bins.
std::vector<BinEstimate> conditional_indirect_effect(const SfmDataset& ds, const NuisanceFits& fits,
                                                     const std::vector<AgeBin>& bins,
                                                     const CellBootstrap& boot = {});

struct ProportionCell {
  std::size_t k = 0;
  std::size_t n = 0;
  double share = 0.0;
  Interval ci;
  bool masked = false;
};

struct MechanismProfiles {
  std::vector<AgeBin> bins;
  // urgent_share[group][bin]: share of non-elective admissions.
  std::vector<ProportionCell> urgent_share[2];
  // mortality[urgent][bin]: outcome rate, index 0 elective, 1 urgent.
  std::vector<ProportionCell> mortality[2];
};

MechanismProfiles mechanism_profiles(const SfmDataset& ds, const std::vector<AgeBin>& bins,
                                     const std::string& elective_level = "Surgery-Elective");

struct CorrelationResult {
  double rho = 0.0;
  Interval ci;
  std::size_t cells = 0;
  int replicates = 0;
  std::vector<std::string> warnings;
};

// Produces the two heatmaps for bootstrap replicate `index`.
using HeatmapReplicate = std::function<std::pair<Heatmap, Heatmap>(int index)>;

double pearson(const std::vector<double>& a, const std::vector<double>& b);

// Pearson correlation over cells unmasked in both maps (optionally against
// -L). The CI is rho +/- z * sd of the replicate correlations, clamped to
// [-1, 1]; without a replicate callback the CI collapses to rho.
CorrelationResult heatmap_correlation(const Heatmap& h, const Heatmap& l, bool negate_l,
                                      const HeatmapReplicate& replicate = {}, int replicates = 0);

}  // namespace sfm
