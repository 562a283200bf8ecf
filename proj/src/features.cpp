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

#include "sfm/features.hpp"

#include <cstring>
#include <string>
#include <unordered_map>

#include "sfm/error.hpp"

namespace sfm {

void FeatureMatrix::add_column(std::string name, std::span<const double> col) {
  if (names.empty() && values.empty()) rows = col.size();
  if (col.size() != rows) throw InternalError("feature column length mismatch");
  names.push_back(std::move(name));
  values.insert(values.end(), col.begin(), col.end());
}

FeatureMatrix build_features(const SfmDataset& ds, std::span<const std::string> columns) {
  FeatureMatrix fm;
  fm.rows = ds.n_rows();
  std::vector<double> buf(ds.n_rows());
  for (const auto& name : columns) {
    const Column& col = ds.column(name);
    if (col.kind == ColumnKind::kNumeric) {
      const double sentinel = ds.sentinel(name);
      for (std::size_t r = 0; r < ds.n_rows(); ++r) buf[r] = col.is_missing(r) ? sentinel : col.numeric[r];
      fm.add_column(name, buf);
      continue;
    }
    for (std::size_t l = 0; l < col.levels.size(); ++l) {
      for (std::size_t r = 0; r < ds.n_rows(); ++r)
        buf[r] = col.codes[r] == static_cast<std::int32_t>(l) ? 1.0 : 0.0;
      fm.add_column(name + "=" + col.levels[l], buf);
    }
    bool any_missing = false;
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
      buf[r] = col.is_missing(r) ? 1.0 : 0.0;
      any_missing = any_missing || col.is_missing(r);
    }
    if (any_missing) fm.add_column(name + "=NA", buf);
  }
  return fm;
}

FeatureMatrix select_rows(const FeatureMatrix& fm, std::span<const std::size_t> rows) {
  FeatureMatrix out;
  out.rows = rows.size();
  out.names = fm.names;
  out.values.resize(rows.size() * fm.cols());
  for (std::size_t c = 0; c < fm.cols(); ++c) {
    const double* src = fm.values.data() + c * fm.rows;
    double* dst = out.values.data() + c * rows.size();
    for (std::size_t k = 0; k < rows.size(); ++k) dst[k] = src[rows[k]];
  }
  return out;
}

UniqueRows unique_rows(const FeatureMatrix& fm) {
  const std::size_t p = fm.cols();
  UniqueRows out;
  out.index.resize(fm.rows);
  std::unordered_map<std::string, std::uint32_t> seen;
  std::vector<std::size_t> firsts;
  std::string key(p * sizeof(double), '\0');
  for (std::size_t r = 0; r < fm.rows; ++r) {
    for (std::size_t c = 0; c < p; ++c) {
      const double v = fm.at(r, c);
      std::memcpy(key.data() + c * sizeof(double), &v, sizeof(double));
    }
    auto [it, inserted] = seen.try_emplace(key, static_cast<std::uint32_t>(firsts.size()));
    if (inserted) firsts.push_back(r);
    out.index[r] = it->second;
  }
  out.unique = select_rows(fm, firsts);
  return out;
}

FeatureMatrix prepend_column(const FeatureMatrix& rest, std::string name, std::span<const double> lead) {
  if (!rest.names.empty() && lead.size() != rest.rows) throw InternalError("prepend_column length mismatch");
  FeatureMatrix fm;
  fm.rows = lead.size();
  fm.names.reserve(rest.cols() + 1);
  fm.names.push_back(std::move(name));
  fm.names.insert(fm.names.end(), rest.names.begin(), rest.names.end());
  fm.values.reserve(lead.size() * (rest.cols() + 1));
  fm.values.insert(fm.values.end(), lead.begin(), lead.end());
  fm.values.insert(fm.values.end(), rest.values.begin(), rest.values.end());
  return fm;
}

}  // namespace sfm
