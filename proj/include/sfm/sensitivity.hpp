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
#include <string>
#include <vector>

#include "sfm/ctf.hpp"

namespace sfm {

// Lower confidence bound for the q-quantile of `e_min`: the empirical
// quantile at level max(0, q - eps_n), eps_n = sqrt(ln(2 / alpha) / (2 n)).
double overlap_bound(const std::vector<double>& e_min, double q, double alpha = 0.05);

struct OverlapRow {
  double q = 0.0;
  double threshold = 0.0;  // Q(q) on the full-data e_min
  std::size_t removed = 0;
  std::size_t retained = 0;
  TvDecomposition decomposition;
  double bound = 0.0;
  bool violation = false;
};

struct OverlapReport {
  double alpha = 0.05;
  double floor = 0.01;  // propensity clip the estimators rely on
  TvDecomposition baseline;
  std::vector<OverlapRow> rows;
};

// For each q: keep rows with e_min > Q(q) (q = 0 keeps everything), refit
// nuisances on the kept rows and decompose again. Violation when the bound on
// the kept rows' e_min falls below max(Q(q), floor).
OverlapReport overlap_analysis(const SfmDataset& ds, const NuisanceFits& fits, const std::vector<double>& quantiles,
                               const PipelineOptions& options, double alpha = 0.05);

struct PooledEstimate {
  std::string name;
  double estimate = 0.0;
  double within = 0.0;   // mean squared SE over draws
  double between = 0.0;  // variance of the draw estimates
  double total = 0.0;    // within + (1 + 1/m) between
  double se = 0.0;
  Interval ci;
};

struct MissingnessReport {
  int draws = 0;
  std::size_t missing = 0;
  std::vector<TvDecomposition> per_draw;
  std::vector<PooledEstimate> pooled;  // tv, direct, indirect_negated, confounded_negated
  TvDecomposition complete_case;
  const PooledEstimate& component(const std::string& name) const;
};

// Imputes the missing attribute from a classifier of X on (Z, W, Y) fitted to
// complete rows, decomposes each imputed dataset and pools by Rubin's rules.
MissingnessReport missingness_analysis(const SfmDataset& ds, const PipelineOptions& options, int draws = 10);

}  // namespace sfm
