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

#include "sfm/sensitivity.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "sfm/error.hpp"
#include "sfm/features.hpp"
#include "sfm/rng.hpp"
#include "sfm/stats.hpp"

namespace sfm {

namespace {

constexpr std::uint64_t kImputeTag = 0x696d7075;  // "impu"

}  // namespace

double overlap_bound(const std::vector<double>& e_min, double q, double alpha) {
  if (e_min.empty()) throw DegenerateError("overlap bound needs at least one propensity");
  if (!(q >= 0.0 && q < 1.0)) throw ConfigError("trimming quantile must lie in [0, 1)");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  const double eps = std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(e_min.size())));
  return quantile_inverse_ecdf(e_min, std::max(0.0, q - eps));
}

OverlapReport overlap_analysis(const SfmDataset& ds, const NuisanceFits& fits, const std::vector<double>& quantiles,
                               const PipelineOptions& options, double alpha) {
  if (fits.n_rows() != ds.n_rows()) throw InternalError("nuisance fits do not match the dataset");
  for (std::size_t i = 0; i < quantiles.size(); ++i) {
    if (!(quantiles[i] >= 0.0 && quantiles[i] < 1.0)) throw ConfigError("trimming quantiles must lie in [0, 1)");
    if (i > 0 && quantiles[i] < quantiles[i - 1]) throw ConfigError("trimming quantiles must be nondecreasing");
  }
  const std::vector<double> e_min = predict_min_propensity(fits);
  OverlapReport rep;
  rep.alpha = alpha;
  rep.floor = fits.clip;
  rep.baseline = decompose_tv(ds, fits, options.estimate);
  for (double q : quantiles) {
    OverlapRow row;
    row.q = q;
    if (q == 0.0) {
      row.threshold = *std::min_element(e_min.begin(), e_min.end());
      row.retained = ds.n_rows();
      row.decomposition = rep.baseline;
      row.bound = overlap_bound(e_min, 0.0, alpha);
      row.violation = row.bound < fits.clip;
      rep.rows.push_back(std::move(row));
      continue;
    }
    row.threshold = quantile_inverse_ecdf(e_min, q);
    std::vector<std::size_t> keep;
    std::vector<double> kept_e;
    for (std::size_t i = 0; i < e_min.size(); ++i) {
      if (e_min[i] > row.threshold) {
        keep.push_back(i);
        kept_e.push_back(e_min[i]);
      }
    }
    row.retained = keep.size();
    row.removed = ds.n_rows() - keep.size();
    const SfmDataset trimmed = ds.subset(keep);
    const auto x = trimmed.attribute();
    if (std::count(x.begin(), x.end(), 0) == 0 || std::count(x.begin(), x.end(), 1) == 0)
      throw DegenerateError(fmt::format("trimming at q = {:g} empties an attribute group", q));
    const NuisanceFits refit = fit_for(trimmed, options);
    row.decomposition = decompose_tv(trimmed, refit, options.estimate);
    row.bound = overlap_bound(kept_e, q, alpha);
    row.violation = row.bound < std::max(row.threshold, fits.clip);
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

const PooledEstimate& MissingnessReport::component(const std::string& name) const {
  for (const auto& p : pooled) {
    if (p.name == name) return p;
  }
  throw ConfigError("unknown component '" + name + "'");
}

MissingnessReport missingness_analysis(const SfmDataset& ds, const PipelineOptions& options, int draws) {
  if (draws < 1) throw ConfigError("imputation draw count must be >= 1");
  const auto x = ds.attribute();
  std::vector<std::size_t> complete;
  std::vector<std::size_t> missing;
  for (std::size_t r = 0; r < x.size(); ++r) (x[r] < 0 ? missing : complete).push_back(r);
  if (complete.empty()) throw DegenerateError("no rows with an observed attribute");

  MissingnessReport rep;
  rep.draws = draws;
  rep.missing = missing.size();
  {
    const SfmDataset cc = ds.subset(complete);
    rep.complete_case = decompose_tv(cc, fit_for(cc, options), options.estimate);
  }

  std::vector<double> p_x0(x.size(), 0.0);
  if (!missing.empty()) {
    const auto& schema = ds.schema();
    std::vector<std::string> zw = schema.confounder_columns;
    zw.insert(zw.end(), schema.mediator_columns.begin(), schema.mediator_columns.end());
    const FeatureMatrix f = prepend_column(build_features(ds, zw), "Y", ds.outcome());
    std::vector<double> is_x0(x.size());
    for (std::size_t r = 0; r < x.size(); ++r) is_x0[r] = x[r] == 0 ? 1.0 : 0.0;
    const auto model = fit_model(options.spec, Objective::kLogistic, f, is_x0, complete);
    const auto pred = model->predict(select_rows(f, missing));
    for (std::size_t k = 0; k < missing.size(); ++k) p_x0[missing[k]] = pred[k];
  }

  for (int d = 0; d < draws; ++d) {
    std::vector<std::int8_t> filled = x;
    Rng rng(derive_seed(options.seed, kImputeTag, static_cast<std::uint64_t>(d)));
    for (auto r : missing) filled[r] = rng.bernoulli(p_x0[r]) ? 0 : 1;
    const SfmDataset imputed = missing.empty() ? ds : ds.with_attribute(filled);
    rep.per_draw.push_back(decompose_tv(imputed, fit_for(imputed, options), options.estimate));
  }

  const double m = static_cast<double>(draws);
  auto pool = [&](const std::string& name, auto pick) {
    PooledEstimate p;
    p.name = name;
    std::vector<double> est;
    for (const auto& dec : rep.per_draw) {
      const CtfEstimate& e = pick(dec);
      est.push_back(e.value);
      p.within += e.se * e.se / m;
    }
    const bool constant = std::all_of(est.begin(), est.end(), [&](double v) { return v == est.front(); });
    p.estimate = constant ? est.front() : mean(est);
    p.between = constant ? 0.0 : sample_sd(est) * sample_sd(est);
    p.total = p.within + (1.0 + 1.0 / m) * p.between;
    p.se = std::sqrt(p.total);
    p.ci = {p.estimate - kZ975 * p.se, p.estimate + kZ975 * p.se};
    rep.pooled.push_back(p);
  };
  pool("tv", [](const TvDecomposition& t) -> const CtfEstimate& { return t.tv; });
  pool("direct", [](const TvDecomposition& t) -> const CtfEstimate& { return t.direct; });
  pool("indirect_negated", [](const TvDecomposition& t) -> const CtfEstimate& { return t.indirect_negated; });
  pool("confounded_negated", [](const TvDecomposition& t) -> const CtfEstimate& { return t.confounded_negated; });
  return rep;
}

}  // namespace sfm
