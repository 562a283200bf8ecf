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
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sfm/features.hpp"
#include "sfm/kernels.hpp"

namespace sfm {

enum class LearnerKind { kGradientBoostedTrees, kLogisticLinear };
enum class Objective { kLogistic, kSquared };

struct LearnerSpec {
  LearnerKind kind = LearnerKind::kGradientBoostedTrees;
  int trees = 150;
  int depth = 4;
  double learning_rate = 0.1;
  int min_leaf = 20;
  double l2 = 1.0;

  // tree count >= 1, depth >= 1, learning rate in (0, 1], min_leaf >= 1, l2 >= 0.
  void validate() const;
  std::string kind_name() const;
  static LearnerKind parse_kind(std::string_view name);
};

class Model {
 public:
  virtual ~Model() = default;
  // Probabilities for the logistic objective, fitted values for squared.
  virtual std::vector<double> predict(const FeatureMatrix& x) const = 0;
};

// Gradient-boosted regression trees with Newton leaf values and L2 leaf
// regularization. Features are quantized to at most 256 bins; identical
// binned rows are merged into weighted patterns before boosting, which is
// exact because both losses depend on a pattern only through its row count
// and target sum.
class GradientBoostedTrees final : public Model {
 public:
  static GradientBoostedTrees fit(const LearnerSpec& spec, Objective objective, const FeatureMatrix& x,
                                  std::span<const double> target, std::span<const std::size_t> rows);

  std::vector<double> predict(const FeatureMatrix& x) const override;
  std::vector<double> predict_raw(const FeatureMatrix& x) const;

  // Mean training loss before the first tree and after each round.
  const std::vector<double>& training_loss() const { return training_loss_; }
  const std::vector<kernels::Tree>& trees() const { return trees_; }
  std::size_t pattern_count() const { return pattern_count_; }

 private:
  Objective objective_ = Objective::kLogistic;
  double base_ = 0.0;
  std::vector<kernels::Tree> trees_;
  std::vector<double> training_loss_;
  std::size_t pattern_count_ = 0;
};

// Ridge-penalized logistic regression (Newton) or ridge least squares on
// standardized features.
class LogisticLinear final : public Model {
 public:
  static LogisticLinear fit(const LearnerSpec& spec, Objective objective, const FeatureMatrix& x,
                            std::span<const double> target, std::span<const std::size_t> rows);
  std::vector<double> predict(const FeatureMatrix& x) const override;

 private:
  Objective objective_ = Objective::kLogistic;
  std::vector<double> center_;
  std::vector<double> scale_;
  std::vector<double> coef_;  // intercept first
};

std::unique_ptr<Model> fit_model(const LearnerSpec& spec, Objective objective, const FeatureMatrix& x,
                                 std::span<const double> target, std::span<const std::size_t> rows);

}  // namespace sfm
