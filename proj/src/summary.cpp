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

#include "sfm/summary.hpp"

#include "sfm/error.hpp"
#include "sfm/stats.hpp"

namespace sfm {

CohortSummary summarize_cohort(const SfmDataset& ds, const std::vector<std::string>& variables) {
  const auto x = ds.attribute();
  CohortSummary out;
  out.groups[0].label = ds.schema().minority_level;
  out.groups[1].label = ds.schema().majority_level;
  for (auto v : x) {
    if (v < 0) ++out.attribute_missing;
    else ++out.groups[static_cast<std::size_t>(v)].n;
  }
  const double total = static_cast<double>(out.groups[0].n + out.groups[1].n);
  for (std::size_t g = 0; g < 2; ++g) {
    if (out.groups[g].n == 0)
      throw DegenerateError("cohort summary: group '" + out.groups[g].label + "' has no rows");
    out.groups[g].percent = 100.0 * static_cast<double>(out.groups[g].n) / total;
  }

  for (const auto& name : variables) {
    const Column& col = ds.column(name);
    VariableSummary vs;
    vs.name = name;
    vs.kind = col.kind;
    if (col.kind == ColumnKind::kNumeric) {
      std::array<std::vector<double>, 2> values;
      for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        if (x[r] < 0 || col.is_missing(r)) continue;
        values[static_cast<std::size_t>(x[r])].push_back(col.numeric[r]);
      }
      for (std::size_t g = 0; g < 2; ++g) {
        auto& st = vs.numeric[g];
        st.n = values[g].size();
        if (st.n == 0) continue;
        st.median = quantile_linear(values[g], 0.5);
        st.q1 = quantile_linear(values[g], 0.25);
        st.q3 = quantile_linear(values[g], 0.75);
        st.mean = mean(values[g]);
      }
      vs.test = "rank-sum";
      if (!values[0].empty() && !values[1].empty())
        vs.p_value = rank_sum_test(values[0], values[1]).p_value;
    } else {
      vs.levels.resize(col.levels.size());
      for (std::size_t l = 0; l < col.levels.size(); ++l) vs.levels[l].level = col.levels[l];
      std::array<double, 2> denom{};
      for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        if (x[r] < 0 || col.is_missing(r)) continue;
        const auto g = static_cast<std::size_t>(x[r]);
        ++vs.levels[static_cast<std::size_t>(col.codes[r])].count[g];
        denom[g] += 1.0;
      }
      std::vector<std::vector<double>> table(2, std::vector<double>(vs.levels.size()));
      for (std::size_t l = 0; l < vs.levels.size(); ++l) {
        for (std::size_t g = 0; g < 2; ++g) {
          const double c = static_cast<double>(vs.levels[l].count[g]);
          vs.levels[l].percent[g] = denom[g] > 0 ? 100.0 * c / denom[g] : 0.0;
          table[g][l] = c;
        }
      }
      vs.test = "chi-square";
      vs.p_value = chi_square_independence(table).p_value;
    }
    out.variables.push_back(std::move(vs));
  }
  return out;
}

}  // namespace sfm
