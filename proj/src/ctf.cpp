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

#include "sfm/ctf.hpp"

#include <algorithm>
#include <cmath>

#include "sfm/error.hpp"
#include "sfm/kernels.hpp"

namespace sfm {

namespace {

struct GroupShares {
  std::size_t n = 0;
  std::size_t count[2] = {0, 0};
};

GroupShares shares(const std::vector<std::int8_t>& x) {
  GroupShares g;
  g.n = x.size();
  for (auto v : x) {
    if (v < 0) throw ValidationError("estimation requires an observed attribute on every row");
    ++g.count[v];
  }
  return g;
}

void check_query(const CtfQuery& q, const NuisanceFits& fits) {
  for (int v : {q.a, q.b, q.c}) {
    if (v != 0 && v != 1) throw ConfigError("counterfactual arm levels must be 0 (x0) or 1 (x1)");
  }
  if (!q.outcome.empty() && q.outcome != fits.outcome)
    throw ConfigError("nuisances were fitted for outcome '" + fits.outcome + "', not '" + q.outcome + "'");
}

CtfEstimate estimate_from(const std::vector<std::int8_t>& x, const std::vector<double>& y, const NuisanceFits& fits,
                          const GroupShares& g, const CtfQuery& q, const EstimateOptions& options) {
  const std::size_t n = g.n;
  if (n == 0 || g.count[q.c] == 0) throw DegenerateError("conditioning group is empty");
  if (fits.n_rows() != n) throw InternalError("nuisance fits do not match the dataset");
  kernels::PseudoOutcomeInputs in;
  in.x = x;
  in.y = y;
  in.mu_b = fits.mu[q.b];
  in.eta_ab = fits.eta[q.a][q.b];
  in.rho_x0 = fits.rho0;
  in.pi_x0 = fits.pi0;
  in.a = q.a;
  in.b = q.b;
  in.c = q.c;
  std::vector<double> phi(n);
  kernels::pseudo_outcome(in, phi);
  const double share = static_cast<double>(g.count[q.c]) / static_cast<double>(n);
  for (double& v : phi) v /= share;
  for (double v : phi) {
    SFM_ASSERT(std::isfinite(v), "non-finite pseudo-outcome");
  }
  const double raw = kernels::sum(phi) / static_cast<double>(n);
  // Centering accounts for the estimated group share in the denominator.
  std::vector<double> influence(n);
  for (std::size_t i = 0; i < n; ++i) influence[i] = phi[i] - (x[i] == q.c ? raw / share : 0.0);
  double value = raw;
  bool truncated = false;
  if (options.truncate && (value < 0.0 || value > 1.0)) {
    value = std::clamp(value, 0.0, 1.0);
    truncated = true;
  }
  CtfEstimate est = CtfEstimate::from_influence(value, std::move(influence));
  est.truncated = truncated;
  return est;
}

}  // namespace

CtfEstimate CtfEstimate::from_influence(double value, std::vector<double> influence) {
  CtfEstimate e;
  e.value = value;
  const double n = static_cast<double>(influence.size());
  e.se = influence.size() > 1 ? sample_sd(influence) / std::sqrt(n) : 0.0;
  e.ci95 = {value - kZ975 * e.se, value + kZ975 * e.se};
  e.influence = std::move(influence);
  return e;
}

CtfEstimate combine(const std::vector<std::pair<double, const CtfEstimate*>>& terms) {
  if (terms.empty()) throw InternalError("empty combination");
  const std::size_t n = terms.front().second->influence.size();
  double value = 0.0;
  std::vector<double> influence(n, 0.0);
  for (const auto& [w, e] : terms) {
    if (e->influence.size() != n) throw InternalError("influence length mismatch");
    value += w * e->value;
    for (std::size_t i = 0; i < n; ++i) influence[i] += w * e->influence[i];
  }
  return CtfEstimate::from_influence(value, std::move(influence));
}

CtfEstimate contrast(const CtfEstimate& lhs, const CtfEstimate& rhs) {
  return combine({{1.0, &lhs}, {-1.0, &rhs}});
}

CtfEstimate estimate_ctf_mean(const SfmDataset& ds, const NuisanceFits& fits, const CtfQuery& q,
                              const EstimateOptions& options) {
  check_query(q, fits);
  const auto x = ds.attribute();
  const GroupShares g = shares(x);
  return estimate_from(x, ds.outcome(fits.outcome), fits, g, q, options);
}

double plugin_ctf_mean(const SfmDataset& ds, const NuisanceFits& fits, const CtfQuery& q) {
  check_query(q, fits);
  const auto x = ds.attribute();
  const GroupShares g = shares(x);
  if (g.count[q.c] == 0) throw DegenerateError("conditioning group is empty");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == q.c) s += fits.eta[q.a][q.b][i];
  }
  return s / static_cast<double>(g.count[q.c]);
}

ArmTable estimate_all_arms(const SfmDataset& ds, const NuisanceFits& fits, const EstimateOptions& options) {
  const auto x = ds.attribute();
  const GroupShares g = shares(x);
  const auto y = ds.outcome(fits.outcome);
  ArmTable t;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int c = 0; c < 2; ++c) {
        CtfEstimate e = estimate_from(x, y, fits, g, {a, b, c, {}}, options);
        if (e.truncated) ++t.truncations;
        t.psi[static_cast<std::size_t>(a * 4 + b * 2 + c)] = std::move(e);
      }
    }
  }
  return t;
}

TvDecomposition decompose_tv(const ArmTable& arms, std::size_t n_x0, std::size_t n_x1, bool reverse) {
  TvDecomposition d;
  d.reverse = reverse;
  d.n_x0 = n_x0;
  d.n_x1 = n_x1;
  d.tv = contrast(arms.arm(1, 1, 1), arms.arm(0, 0, 0));
  if (!reverse) {
    d.direct = contrast(arms.arm(0, 1, 0), arms.arm(0, 0, 0));
    d.indirect_negated = contrast(arms.arm(1, 1, 0), arms.arm(0, 1, 0));
  } else {
    d.direct = contrast(arms.arm(1, 1, 0), arms.arm(1, 0, 0));
    d.indirect_negated = contrast(arms.arm(1, 0, 0), arms.arm(0, 0, 0));
  }
  d.confounded_negated = contrast(arms.arm(1, 1, 1), arms.arm(1, 1, 0));
  d.meta.truncations = arms.truncations;
  return d;
}

namespace {

TvDecomposition decompose_with(const SfmDataset& ds, const NuisanceFits& fits, const EstimateOptions& options,
                               bool reverse) {
  const ArmTable arms = estimate_all_arms(ds, fits, options);
  const GroupShares g = shares(ds.attribute());
  TvDecomposition d = decompose_tv(arms, g.count[0], g.count[1], reverse);
  d.meta.dataset_id = ds.id();
  d.meta.learner = fits.spec.kind_name();
  d.meta.seed = fits.plan.seed;
  d.meta.folds = fits.plan.folds;
  d.meta.clip = fits.clip;
  d.meta.clipped = fits.clipped;
  return d;
}

}  // namespace

TvDecomposition decompose_tv(const SfmDataset& ds, const NuisanceFits& fits, const EstimateOptions& options) {
  return decompose_with(ds, fits, options, false);
}

TvDecomposition decompose_tv_reverse(const SfmDataset& ds, const NuisanceFits& fits, const EstimateOptions& options) {
  return decompose_with(ds, fits, options, true);
}

NuisanceFits fit_for(const SfmDataset& ds, const PipelineOptions& options) {
  const CrossFitPlan plan = CrossFitPlan::make(ds.attribute(), options.folds, options.seed);
  return fit_crossfit(ds, options.spec, plan, options.clip);
}

}  // namespace sfm
