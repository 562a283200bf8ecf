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

// Data-parallel inner loops. Each kernel has a plain serial reference and an
// OpenMP version. The OpenMP versions split work into fixed-size chunks and
// combine partial results in chunk order, so their output does not depend on
// the thread count.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sfm/features.hpp"

namespace sfm::kernels {

inline constexpr std::size_t kChunk = 4096;

// Quantized features, column-major, one byte per cell.
struct BinnedMatrix {
  std::size_t rows = 0;
  std::vector<std::uint8_t> bins;
  std::vector<std::uint16_t> n_bins;  // per feature, <= 256
  std::vector<std::size_t> offset;    // start of each feature in a histogram

  std::size_t cols() const { return n_bins.size(); }
  std::size_t total_bins() const { return offset.empty() ? 0 : offset.back() + n_bins.back(); }
  std::uint8_t at(std::size_t r, std::size_t c) const { return bins[c * rows + r]; }
};

struct HistBin {
  double grad = 0.0;
  double hess = 0.0;
  double weight = 0.0;
};

void accumulate_histogram_serial(const BinnedMatrix& m, std::span<const std::uint32_t> items,
                                 std::span<const double> grad, std::span<const double> hess,
                                 std::span<const double> weight, std::span<HistBin> out);
void accumulate_histogram(const BinnedMatrix& m, std::span<const std::uint32_t> items,
                          std::span<const double> grad, std::span<const double> hess,
                          std::span<const double> weight, std::span<HistBin> out);

// Binary tree in flat storage; feature < 0 marks a leaf. Rows with
// x[feature] <= threshold go left.
struct TreeNode {
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;
};
using Tree = std::vector<TreeNode>;

double predict_tree(const Tree& tree, const FeatureMatrix& x, std::size_t row);
// out[r] = base + sum of tree outputs for row r.
void predict_ensemble_serial(const std::vector<Tree>& trees, double base, const FeatureMatrix& x,
                             std::span<double> out);
void predict_ensemble(const std::vector<Tree>& trees, double base, const FeatureMatrix& x,
                      std::span<double> out);

// Per-row pseudo-outcome for the nested counterfactual mean with mediator arm
// a, direct arm b and conditioning group c, before division by P(X = c):
//   1{X=b} rho_a/rho_b * pi_c/pi_a * (Y - mu_b)
// + 1{X=a} pi_c/pi_a * (mu_b - eta_ab)
// + 1{X=c} eta_ab
struct PseudoOutcomeInputs {
  std::span<const std::int8_t> x;
  std::span<const double> y;
  std::span<const double> mu_b;    // mu(b, Z_i, W_i)
  std::span<const double> eta_ab;  // eta_{a,b}(Z_i)
  std::span<const double> rho_x0;  // P(X = x0 | Z_i, W_i), clipped
  std::span<const double> pi_x0;   // P(X = x0 | Z_i), clipped
  int a = 0;
  int b = 0;
  int c = 0;
};

void pseudo_outcome_serial(const PseudoOutcomeInputs& in, std::span<double> out);
void pseudo_outcome(const PseudoOutcomeInputs& in, std::span<double> out);

double sum_serial(std::span<const double> v);
// Blocked summation; result independent of thread count.
double sum(std::span<const double> v);

}  // namespace sfm::kernels
