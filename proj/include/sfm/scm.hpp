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

#include <json.hpp>

#include "sfm/dataset.hpp"
#include "sfm/heatmap.hpp"

namespace sfm {

enum class Link { kLogit, kIdentity };

// base + x*[x=1] + sum_j z[j][Z_j] + sum_k w[k][W_k]
//      + [x=1] * (sum_j xz[j][Z_j] + sum_k xw[k][W_k]).
// Missing or short coefficient rows count as zero.
struct LinearIndex {
  double base = 0.0;
  double x = 0.0;
  std::vector<std::vector<double>> z;
  std::vector<std::vector<double>> w;
  std::vector<std::vector<double>> xz;
  std::vector<std::vector<double>> xw;

  double eval(int xv, std::span<const int> zv, std::span<const int> wv) const;
  bool has_x_interaction() const;
};

// Z_j drawn from probs[u_c] given the latent confounder u_c.
struct ScmConfounder {
  std::string name;
  std::vector<std::string> levels;
  std::string role;  // "age", "admission" or empty
  std::vector<std::vector<double>> probs;
};

// W_k given (X, Z, W_1..W_{k-1}). index[l - 1] drives level l >= 1; level 0
// is the reference. Logit: softmax with the reference index fixed at 0.
// Identity: P(level l) = index, P(level 0) = 1 - sum.
struct ScmMediator {
  std::string name;
  std::vector<std::string> levels;
  std::string role;
  Link link = Link::kLogit;
  std::vector<LinearIndex> index;
};

// Discrete Standard Fairness Model. Exogenous variables: a categorical latent
// u_c shared by X and Z (the X <-> Z confounding), and independent uniforms
// for X, each Z_j, each W_k and Y. Mechanisms invert those uniforms.
struct ScmSpec {
  std::string name = "scm";
  std::string attribute = "X";
  std::string minority = "x0";
  std::string majority = "x1";
  std::vector<double> latent = {1.0};
  std::vector<double> p_x1 = {0.5};  // per latent level
  std::vector<ScmConfounder> confounders;
  std::vector<ScmMediator> mediators;
  std::string outcome = "Y";
  Link outcome_link = Link::kLogit;
  LinearIndex outcome_index;
  // Requires identity links and no x interactions anywhere, which makes every
  // nested counterfactual mean additive in its three arms.
  bool additive = false;

  // Probabilities in [0, 1] for every parent configuration; throws ConfigError.
  void validate() const;

  double p_y(int x, std::span<const int> z, std::span<const int> w) const;
  // Distribution of W_k over its levels.
  std::vector<double> p_w(std::size_t k, int x, std::span<const int> z, std::span<const int> w) const;
  // P(X = x0 | Z = z) and P(X = x0 | Z = z, W = w).
  double pi_x0(std::span<const int> z) const;
  double rho_x0(std::span<const int> z, std::span<const int> w) const;

  RoleSchema schema() const;

  nlohmann::json to_json() const;
  static ScmSpec from_json(const nlohmann::json& j);
  static ScmSpec load(const std::string& path);
  void save(const std::string& path) const;
};

// Dataset plus the exogenous draws behind it, for empirical counterfactuals.
struct ScmSample {
  SfmDataset data;
  std::vector<std::int8_t> x;
  std::vector<int> z;        // row-major n x |Z|
  std::vector<double> u_w;   // row-major n x |W|
  std::vector<double> u_y;
};

SfmDataset sample_dataset(const ScmSpec& spec, std::size_t n, std::uint64_t seed);
ScmSample sample_units(const ScmSpec& spec, std::size_t n, std::uint64_t seed);
// Mean of Y_{b, W_a}(u) over sampled units with X = c.
double empirical_ctf(const ScmSpec& spec, const ScmSample& sample, int a, int b, int c);

struct OracleEffects {
  double psi[8] = {};
  double p_x1 = 0.0;
  double tv = 0.0;
  double direct = 0.0;
  double indirect_negated = 0.0;
  double confounded_negated = 0.0;
  double direct_rev = 0.0;
  double indirect_rev = 0.0;
  double confounded_rev = 0.0;
  // Present when a grid was given: E[Y_{x1, W} - Y | X = x0, cell]
  // (row-major, NaN for cells without mass) and the indirect effect
  // psi(1,1,0) - psi(0,1,0) within each age bin.
  std::vector<double> de_cells;
  std::vector<double> de_cell_mass;  // P(X = x0, cell)
  std::vector<double> ie_bins;

  double arm(int a, int b, int c) const { return psi[a * 4 + b * 2 + c]; }
  nlohmann::json to_json() const;
};

OracleEffects oracle_effects(const ScmSpec& spec, const CellGrid* grid = nullptr);

}  // namespace sfm
