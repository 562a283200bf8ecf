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

#include "sfm/learner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>

#include <Eigen/Dense>

#include "sfm/error.hpp"

namespace sfm {

namespace {

constexpr std::size_t kMaxBins = 256;

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::fabs(z))); }

// Cut points c_0 < c_1 < ...; bin(x) = #cuts strictly below x, so bin b holds
// c_{b-1} < x <= c_b and a split after bin b is "x <= c_b".
std::vector<double> make_cuts(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::vector<double> uniq = values;
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  std::vector<double> cuts;
  if (uniq.size() <= kMaxBins) {
    for (std::size_t i = 0; i + 1 < uniq.size(); ++i) cuts.push_back(0.5 * (uniq[i] + uniq[i + 1]));
    return cuts;
  }
  const std::size_t m = values.size();
  for (std::size_t j = 1; j < kMaxBins; ++j) {
    const double v = values[j * m / kMaxBins];
    if (v >= values.back()) break;
    if (cuts.empty() || v > cuts.back()) cuts.push_back(v);
  }
  return cuts;
}

std::uint8_t bin_of(const std::vector<double>& cuts, double x) {
  return static_cast<std::uint8_t>(std::lower_bound(cuts.begin(), cuts.end(), x) - cuts.begin());
}

struct Patterns {
  kernels::BinnedMatrix bins;
  std::vector<double> weight;
  std::vector<double> sum;
  std::vector<double> sum_sq;
};

Patterns compress(const FeatureMatrix& x, std::span<const double> target, std::span<const std::size_t> rows,
                  const std::vector<std::vector<double>>& cuts) {
  const std::size_t p = x.cols();
  std::unordered_map<std::string, std::uint32_t> index;
  index.reserve(rows.size() / 4 + 16);
  std::vector<std::uint8_t> row_major;
  Patterns out;
  std::string key(p, '\0');
  for (const std::size_t r : rows) {
    for (std::size_t f = 0; f < p; ++f) key[f] = static_cast<char>(bin_of(cuts[f], x.at(r, f)));
    auto [it, inserted] = index.try_emplace(key, static_cast<std::uint32_t>(out.weight.size()));
    if (inserted) {
      row_major.insert(row_major.end(), key.begin(), key.end());
      out.weight.push_back(0.0);
      out.sum.push_back(0.0);
      out.sum_sq.push_back(0.0);
    }
    const std::uint32_t k = it->second;
    out.weight[k] += 1.0;
    out.sum[k] += target[r];
    out.sum_sq[k] += target[r] * target[r];
  }
  const std::size_t n = out.weight.size();
  auto& bm = out.bins;
  bm.rows = n;
  bm.bins.resize(n * p);
  bm.n_bins.resize(p);
  bm.offset.resize(p);
  std::size_t off = 0;
  for (std::size_t f = 0; f < p; ++f) {
    bm.n_bins[f] = static_cast<std::uint16_t>(cuts[f].size() + 1);
    bm.offset[f] = off;
    off += bm.n_bins[f];
    for (std::size_t i = 0; i < n; ++i) bm.bins[f * n + i] = row_major[i * p + f];
  }
  return out;
}

struct SplitChoice {
  bool found = false;
  std::size_t feature = 0;
  std::size_t bin = 0;
  double gain = 0.0;
};

SplitChoice best_split(const kernels::BinnedMatrix& m, std::span<const kernels::HistBin> hist,
                       double g, double h, double w, const LearnerSpec& spec) {
  SplitChoice best;
  const double lambda = spec.l2;
  const double parent = g * g / (h + lambda);
  const double min_leaf = static_cast<double>(spec.min_leaf);
  for (std::size_t f = 0; f < m.cols(); ++f) {
    double gl = 0.0;
    double hl = 0.0;
    double wl = 0.0;
    const kernels::HistBin* hb = hist.data() + m.offset[f];
    for (std::size_t b = 0; b + 1 < m.n_bins[f]; ++b) {
      gl += hb[b].grad;
      hl += hb[b].hess;
      wl += hb[b].weight;
      const double wr = w - wl;
      if (wl < min_leaf) continue;
      if (wr < min_leaf) break;
      const double hr = h - hl;
      if (hl <= 0.0 || hr <= 0.0) continue;
      const double gr = g - gl;
      const double gain = gl * gl / (hl + lambda) + gr * gr / (hr + lambda) - parent;
      if (gain > 1e-10 && gain > best.gain) best = {true, f, b, gain};
    }
  }
  return best;
}

struct GrowResult {
  kernels::Tree tree;
  std::vector<std::int32_t> leaf_of;
};

GrowResult grow_tree(const Patterns& pat, std::span<const double> grad, std::span<const double> hess,
                     const LearnerSpec& spec, const std::vector<std::vector<double>>& cuts) {
  const auto& m = pat.bins;
  const std::size_t width = m.total_bins();
  struct Work {
    std::int32_t node;
    std::vector<std::uint32_t> items;
    std::vector<kernels::HistBin> hist;
    double g, h, w;
  };
  GrowResult res;
  res.leaf_of.assign(m.rows, 0);
  res.tree.push_back({});

  auto totals = [&](const std::vector<std::uint32_t>& items, double& g, double& h, double& w) {
    g = h = w = 0.0;
    for (auto i : items) {
      g += grad[i];
      h += hess[i];
      w += pat.weight[i];
    }
  };
  auto make_leaf = [&](Work& wk) {
    auto& node = res.tree[static_cast<std::size_t>(wk.node)];
    node.feature = -1;
    node.value = -spec.learning_rate * wk.g / (wk.h + spec.l2);
    for (auto i : wk.items) res.leaf_of[i] = wk.node;
  };

  std::vector<Work> level;
  {
    Work root{0, std::vector<std::uint32_t>(m.rows), std::vector<kernels::HistBin>(width), 0, 0, 0};
    std::iota(root.items.begin(), root.items.end(), 0u);
    kernels::accumulate_histogram(m, root.items, grad, hess, pat.weight, root.hist);
    totals(root.items, root.g, root.h, root.w);
    level.push_back(std::move(root));
  }
  for (int depth = 0; depth < spec.depth && !level.empty(); ++depth) {
    std::vector<Work> next;
    for (auto& wk : level) {
      const SplitChoice s = best_split(m, wk.hist, wk.g, wk.h, wk.w, spec);
      if (!s.found) {
        make_leaf(wk);
        continue;
      }
      Work left{static_cast<std::int32_t>(res.tree.size()), {}, {}, 0, 0, 0};
      Work right{static_cast<std::int32_t>(res.tree.size() + 1), {}, {}, 0, 0, 0};
      res.tree.push_back({});
      res.tree.push_back({});
      auto& node = res.tree[static_cast<std::size_t>(wk.node)];
      node.feature = static_cast<std::int32_t>(s.feature);
      node.threshold = cuts[s.feature][s.bin];
      node.left = left.node;
      node.right = right.node;
      for (auto i : wk.items) {
        (m.at(i, s.feature) <= s.bin ? left.items : right.items).push_back(i);
      }
      totals(left.items, left.g, left.h, left.w);
      totals(right.items, right.g, right.h, right.w);
      if (depth + 1 < spec.depth) {
        Work& small = left.items.size() <= right.items.size() ? left : right;
        Work& large = left.items.size() <= right.items.size() ? right : left;
        small.hist.resize(width);
        kernels::accumulate_histogram(m, small.items, grad, hess, pat.weight, small.hist);
        large.hist = std::move(wk.hist);
        for (std::size_t j = 0; j < width; ++j) {
          large.hist[j].grad -= small.hist[j].grad;
          large.hist[j].hess -= small.hist[j].hess;
          large.hist[j].weight -= small.hist[j].weight;
        }
      }
      next.push_back(std::move(left));
      next.push_back(std::move(right));
    }
    level = std::move(next);
  }
  for (auto& wk : level) make_leaf(wk);
  return res;
}

}  // namespace

void LearnerSpec::validate() const {
  if (trees < 1) throw ConfigError("learner tree count must be >= 1");
  if (depth < 1) throw ConfigError("learner depth must be >= 1");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0))
    throw ConfigError("learner learning rate must lie in (0, 1]");
  if (min_leaf < 1) throw ConfigError("learner min leaf size must be >= 1");
  if (!(l2 >= 0.0)) throw ConfigError("learner L2 penalty must be >= 0");
}

std::string LearnerSpec::kind_name() const {
  return kind == LearnerKind::kGradientBoostedTrees ? "gbt" : "logistic";
}

LearnerKind LearnerSpec::parse_kind(std::string_view name) {
  if (name == "gbt" || name == "gradient-boosted-trees") return LearnerKind::kGradientBoostedTrees;
  if (name == "logistic" || name == "logistic-linear") return LearnerKind::kLogisticLinear;
  throw ConfigError("unknown learner '" + std::string(name) + "' (expected gbt or logistic)");
}

GradientBoostedTrees GradientBoostedTrees::fit(const LearnerSpec& spec, Objective objective,
                                               const FeatureMatrix& x, std::span<const double> target,
                                               std::span<const std::size_t> rows) {
  spec.validate();
  if (rows.empty()) throw DegenerateError("cannot fit a learner on zero rows");
  GradientBoostedTrees model;
  model.objective_ = objective;

  std::vector<std::vector<double>> cuts(x.cols());
  std::vector<double> buf(rows.size());
  for (std::size_t f = 0; f < x.cols(); ++f) {
    for (std::size_t k = 0; k < rows.size(); ++k) buf[k] = x.at(rows[k], f);
    cuts[f] = make_cuts(buf);
  }
  const Patterns pat = compress(x, target, rows, cuts);
  const std::size_t P = pat.weight.size();
  model.pattern_count_ = P;

  const double total_w = std::accumulate(pat.weight.begin(), pat.weight.end(), 0.0);
  const double total_s = std::accumulate(pat.sum.begin(), pat.sum.end(), 0.0);
  const double ybar = total_s / total_w;
  if (objective == Objective::kLogistic) {
    const double p = std::clamp(ybar, 1e-6, 1.0 - 1e-6);
    model.base_ = std::log(p / (1.0 - p));
  } else {
    model.base_ = ybar;
  }

  std::vector<double> score(P, model.base_);
  std::vector<double> grad(P);
  std::vector<double> hess(P);
  auto loss = [&]() {
    double l = 0.0;
    for (std::size_t i = 0; i < P; ++i) {
      if (objective == Objective::kLogistic) {
        l += pat.sum[i] * softplus(-score[i]) + (pat.weight[i] - pat.sum[i]) * softplus(score[i]);
      } else {
        l += pat.sum_sq[i] - 2.0 * score[i] * pat.sum[i] + pat.weight[i] * score[i] * score[i];
      }
    }
    if (objective == Objective::kSquared) l = std::max(l, 0.0);
    return l / total_w;
  };
  model.training_loss_.push_back(loss());

  for (int t = 0; t < spec.trees; ++t) {
    for (std::size_t i = 0; i < P; ++i) {
      if (objective == Objective::kLogistic) {
        const double p = sigmoid(score[i]);
        grad[i] = pat.weight[i] * p - pat.sum[i];
        hess[i] = std::max(pat.weight[i] * p * (1.0 - p), 1e-12 * pat.weight[i]);
      } else {
        grad[i] = pat.weight[i] * score[i] - pat.sum[i];
        hess[i] = pat.weight[i];
      }
    }
    GrowResult g = grow_tree(pat, grad, hess, spec, cuts);
    for (std::size_t i = 0; i < P; ++i) score[i] += g.tree[static_cast<std::size_t>(g.leaf_of[i])].value;
    model.trees_.push_back(std::move(g.tree));
    model.training_loss_.push_back(loss());
  }
  return model;
}

std::vector<double> GradientBoostedTrees::predict_raw(const FeatureMatrix& x) const {
  // Discrete designs repeat rows heavily; score each distinct row once.
  const UniqueRows u = unique_rows(x);
  std::vector<double> scores(u.unique.rows);
  kernels::predict_ensemble(trees_, base_, u.unique, scores);
  std::vector<double> out(x.rows);
  for (std::size_t r = 0; r < x.rows; ++r) out[r] = scores[u.index[r]];
  return out;
}

std::vector<double> GradientBoostedTrees::predict(const FeatureMatrix& x) const {
  std::vector<double> out = predict_raw(x);
  if (objective_ == Objective::kLogistic) {
    for (double& v : out) v = sigmoid(v);
  }
  return out;
}

LogisticLinear LogisticLinear::fit(const LearnerSpec& spec, Objective objective, const FeatureMatrix& x,
                                   std::span<const double> target, std::span<const std::size_t> rows) {
  spec.validate();
  if (rows.empty()) throw DegenerateError("cannot fit a learner on zero rows");
  LogisticLinear model;
  model.objective_ = objective;
  const std::size_t p = x.cols();
  const std::size_t n = rows.size();
  model.center_.assign(p, 0.0);
  model.scale_.assign(p, 1.0);
  for (std::size_t f = 0; f < p; ++f) {
    double s = 0.0;
    double ss = 0.0;
    for (auto r : rows) {
      s += x.at(r, f);
      ss += x.at(r, f) * x.at(r, f);
    }
    const double m = s / static_cast<double>(n);
    const double var = std::max(ss / static_cast<double>(n) - m * m, 0.0);
    model.center_[f] = m;
    model.scale_[f] = var > 1e-24 ? std::sqrt(var) : 0.0;
  }
  Eigen::MatrixXd design(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p + 1));
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    design(i, 0) = 1.0;
    for (std::size_t f = 0; f < p; ++f) {
      const double sc = model.scale_[f];
      design(i, static_cast<Eigen::Index>(f + 1)) = sc > 0 ? (x.at(rows[k], f) - model.center_[f]) / sc : 0.0;
    }
    y(i) = target[rows[k]];
  }
  Eigen::MatrixXd penalty = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(p + 1), static_cast<Eigen::Index>(p + 1)) * spec.l2;
  penalty(0, 0) = 0.0;
  // Columns with zero variance get a unit penalty so the system stays regular.
  for (std::size_t f = 0; f < p; ++f) {
    if (model.scale_[f] == 0.0) penalty(static_cast<Eigen::Index>(f + 1), static_cast<Eigen::Index>(f + 1)) = 1.0;
  }
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p + 1));
  if (objective == Objective::kSquared) {
    const Eigen::MatrixXd a = design.transpose() * design + penalty;
    beta = a.ldlt().solve(design.transpose() * y);
  } else {
    const double ybar = std::clamp(y.mean(), 1e-6, 1.0 - 1e-6);
    beta(0) = std::log(ybar / (1.0 - ybar));
    for (int iter = 0; iter < 100; ++iter) {
      Eigen::VectorXd eta = design * beta;
      Eigen::VectorXd prob = eta.unaryExpr([](double z) { return sigmoid(z); });
      Eigen::VectorXd w = prob.unaryExpr([](double q) { return std::max(q * (1.0 - q), 1e-10); });
      const Eigen::VectorXd g = design.transpose() * (y - prob) - penalty * beta;
      const Eigen::MatrixXd hmat = design.transpose() * w.asDiagonal() * design + penalty;
      const Eigen::VectorXd step = hmat.ldlt().solve(g);
      beta += step;
      if (step.lpNorm<Eigen::Infinity>() < 1e-9) break;
    }
  }
  model.coef_.assign(beta.data(), beta.data() + beta.size());
  return model;
}

std::vector<double> LogisticLinear::predict(const FeatureMatrix& x) const {
  std::vector<double> out(x.rows);
  for (std::size_t r = 0; r < x.rows; ++r) {
    double z = coef_[0];
    for (std::size_t f = 0; f < center_.size(); ++f) {
      if (scale_[f] > 0) z += coef_[f + 1] * (x.at(r, f) - center_[f]) / scale_[f];
    }
    out[r] = objective_ == Objective::kLogistic ? sigmoid(z) : z;
  }
  return out;
}

std::unique_ptr<Model> fit_model(const LearnerSpec& spec, Objective objective, const FeatureMatrix& x,
                                 std::span<const double> target, std::span<const std::size_t> rows) {
  if (spec.kind == LearnerKind::kGradientBoostedTrees)
    return std::make_unique<GradientBoostedTrees>(GradientBoostedTrees::fit(spec, objective, x, target, rows));
  return std::make_unique<LogisticLinear>(LogisticLinear::fit(spec, objective, x, target, rows));
}

}  // namespace sfm
