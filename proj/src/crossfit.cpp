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

#include "sfm/crossfit.hpp"

#include <algorithm>
#include <numeric>

#include "sfm/error.hpp"
#include "sfm/features.hpp"
#include "sfm/rng.hpp"

namespace sfm {

namespace {

constexpr std::uint64_t kFoldTag = 0x666f6c64;  // "fold"

std::vector<int> assign_folds(std::span<const std::int8_t> attribute, int folds, std::uint64_t seed) {
  std::vector<int> fold_of(attribute.size(), -1);
  for (int level = 0; level < 2; ++level) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < attribute.size(); ++r) {
      if (attribute[r] == level) rows.push_back(r);
    }
    Rng rng(derive_seed(seed, kFoldTag, static_cast<std::uint64_t>(level)));
    for (std::size_t i = rows.size(); i > 1; --i) std::swap(rows[i - 1], rows[rng.below(i)]);
    // Level 1 continues the deal where level 0 stopped so small groups do not
    // all land in the first folds.
    const std::size_t start = level == 0 ? 0 : std::count_if(attribute.begin(), attribute.end(),
                                                             [](std::int8_t v) { return v == 0; });
    for (std::size_t i = 0; i < rows.size(); ++i)
      fold_of[rows[i]] = static_cast<int>((start + i) % static_cast<std::size_t>(folds));
  }
  return fold_of;
}

bool plan_usable(std::span<const std::int8_t> attribute, const std::vector<int>& fold_of, int folds) {
  std::vector<std::size_t> size(static_cast<std::size_t>(folds), 0);
  std::vector<std::size_t> level_in(static_cast<std::size_t>(folds) * 2, 0);
  std::size_t total[2] = {0, 0};
  for (std::size_t r = 0; r < attribute.size(); ++r) {
    const auto f = static_cast<std::size_t>(fold_of[r]);
    ++size[f];
    ++level_in[f * 2 + static_cast<std::size_t>(attribute[r])];
    ++total[attribute[r]];
  }
  for (std::size_t f = 0; f < size.size(); ++f) {
    if (size[f] == 0) return false;
    if (total[0] - level_in[f * 2] == 0 || total[1] - level_in[f * 2 + 1] == 0) return false;
  }
  return true;
}

double clip_prob(double p, double eps, std::size_t& clipped) {
  const double q = std::clamp(p, eps, 1.0 - eps);
  if (q != p) ++clipped;
  return q;
}

std::vector<std::size_t> rows_with(std::span<const std::size_t> rows, const std::vector<std::int8_t>& x, int level) {
  std::vector<std::size_t> out;
  for (auto r : rows) {
    if (x[r] == level) out.push_back(r);
  }
  return out;
}

}  // namespace

CrossFitPlan CrossFitPlan::make(std::span<const std::int8_t> attribute, int folds, std::uint64_t seed) {
  if (folds < 2) throw ConfigError("cross-fitting needs at least 2 folds");
  for (auto v : attribute) {
    if (v != 0 && v != 1) throw ValidationError("cross-fitting requires an observed attribute on every row");
  }
  CrossFitPlan plan;
  plan.requested_folds = folds;
  plan.seed = seed;
  for (int k = folds; k >= 2; --k) {
    std::vector<int> fold_of = assign_folds(attribute, k, seed);
    if (plan_usable(attribute, fold_of, k)) {
      plan.folds = k;
      plan.fold_of = std::move(fold_of);
      return plan;
    }
  }
  throw DegenerateError("no fold count >= 2 leaves both attribute levels in every training fold");
}

std::vector<std::size_t> CrossFitPlan::held_out(int fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < fold_of.size(); ++r) {
    if (fold_of[r] == fold) rows.push_back(r);
  }
  return rows;
}

std::vector<std::size_t> CrossFitPlan::training(int fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < fold_of.size(); ++r) {
    if (fold_of[r] != fold) rows.push_back(r);
  }
  return rows;
}

NuisanceFits fit_crossfit(const SfmDataset& ds, const LearnerSpec& spec, const CrossFitPlan& plan, double clip) {
  spec.validate();
  if (!(clip > 0.0 && clip < 0.5)) throw ConfigError("propensity clip must lie in (0, 0.5)");
  const std::size_t n = ds.n_rows();
  if (plan.fold_of.size() != n) throw InternalError("cross-fit plan does not match the dataset");
  const std::vector<std::int8_t> x = ds.attribute();
  for (auto v : x) {
    if (v < 0) throw ValidationError("cross-fitting requires an observed attribute on every row");
  }
  const std::vector<double> y = ds.outcome();

  const auto& schema = ds.schema();
  std::vector<std::string> zw = schema.confounder_columns;
  zw.insert(zw.end(), schema.mediator_columns.begin(), schema.mediator_columns.end());
  const FeatureMatrix fz = build_features(ds, schema.confounder_columns);
  const FeatureMatrix fzw = build_features(ds, zw);
  std::vector<double> is_x0(n);
  for (std::size_t r = 0; r < n; ++r) is_x0[r] = x[r] == 0 ? 1.0 : 0.0;

  NuisanceFits fits;
  fits.plan = plan;
  fits.spec = spec;
  fits.clip = clip;
  fits.outcome = schema.outcome_column;
  fits.dataset_id = ds.id();
  for (int v = 0; v < 2; ++v) {
    fits.mu[v].assign(n, 0.0);
    fits.m[v].assign(n, 0.0);
    for (int b = 0; b < 2; ++b) fits.eta[v][b].assign(n, 0.0);
  }
  fits.pi0.assign(n, 0.0);
  fits.rho0.assign(n, 0.0);
  fits.rho0_raw.assign(n, 0.0);

  std::vector<double> nested(n, 0.0);
  for (int k = 0; k < plan.folds; ++k) {
    const std::vector<std::size_t> train = plan.training(k);
    const std::vector<std::size_t> test = plan.held_out(k);
    if (test.empty()) continue;
    const FeatureMatrix fz_test = select_rows(fz, test);
    const FeatureMatrix fzw_test = select_rows(fzw, test);
    auto scatter = [&](std::vector<double>& dst, const std::vector<double>& pred) {
      for (std::size_t i = 0; i < test.size(); ++i) dst[test[i]] = pred[i];
    };

    std::unique_ptr<Model> mu_model[2];
    std::vector<std::size_t> train_by[2];
    for (int v = 0; v < 2; ++v) {
      train_by[v] = rows_with(train, x, v);
      mu_model[v] = fit_model(spec, Objective::kLogistic, fzw, y, train_by[v]);
      scatter(fits.mu[v], mu_model[v]->predict(fzw_test));
      const auto m_model = fit_model(spec, Objective::kLogistic, fz, y, train_by[v]);
      scatter(fits.m[v], m_model->predict(fz_test));
    }
    const auto pi_model = fit_model(spec, Objective::kLogistic, fz, is_x0, train);
    scatter(fits.pi0, pi_model->predict(fz_test));
    const auto rho_model = fit_model(spec, Objective::kLogistic, fzw, is_x0, train);
    scatter(fits.rho0_raw, rho_model->predict(fzw_test));

    // Nested regression: predictions of mu(b, .) on training rows with X = a
    // (never part of mu_b's own training set), regressed on Z.
    for (int a = 0; a < 2; ++a) {
      const int b = 1 - a;
      const std::vector<double> inner = mu_model[b]->predict(select_rows(fzw, train_by[a]));
      for (std::size_t i = 0; i < train_by[a].size(); ++i) nested[train_by[a][i]] = inner[i];
      const auto eta_model = fit_model(spec, Objective::kSquared, fz, nested, train_by[a]);
      scatter(fits.eta[a][b], eta_model->predict(fz_test));
    }
  }

  std::size_t clipped = 0;
  for (std::size_t r = 0; r < n; ++r) {
    for (int v = 0; v < 2; ++v) {
      fits.mu[v][r] = clip_prob(fits.mu[v][r], clip, clipped);
      fits.m[v][r] = clip_prob(fits.m[v][r], clip, clipped);
    }
    fits.eta[0][1][r] = clip_prob(fits.eta[0][1][r], clip, clipped);
    fits.eta[1][0][r] = clip_prob(fits.eta[1][0][r], clip, clipped);
    fits.eta[0][0][r] = fits.m[0][r];
    fits.eta[1][1][r] = fits.m[1][r];
    fits.pi0[r] = clip_prob(fits.pi0[r], clip, clipped);
    fits.rho0[r] = clip_prob(fits.rho0_raw[r], clip, clipped);
  }
  fits.clipped = clipped;
  return fits;
}

NuisanceFits subset_fits(const NuisanceFits& fits, std::span<const std::size_t> rows) {
  auto pick = [&](const std::vector<double>& v) {
    std::vector<double> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) out[i] = v[rows[i]];
    return out;
  };
  NuisanceFits out = fits;
  for (int v = 0; v < 2; ++v) {
    out.mu[v] = pick(fits.mu[v]);
    out.m[v] = pick(fits.m[v]);
    for (int b = 0; b < 2; ++b) out.eta[v][b] = pick(fits.eta[v][b]);
  }
  out.pi0 = pick(fits.pi0);
  out.rho0 = pick(fits.rho0);
  out.rho0_raw = pick(fits.rho0_raw);
  out.plan.fold_of.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out.plan.fold_of[i] = fits.plan.fold_of[rows[i]];
  return out;
}

std::vector<double> predict_min_propensity(const NuisanceFits& fits) {
  if (fits.rho0_raw.empty() && fits.rho0.empty()) throw ConfigError("propensity fits are missing");
  const auto& rho = fits.rho0_raw.empty() ? fits.rho0 : fits.rho0_raw;
  std::vector<double> out(rho.size());
  for (std::size_t r = 0; r < rho.size(); ++r) out[r] = std::min(rho[r], 1.0 - rho[r]);
  return out;
}

}  // namespace sfm
