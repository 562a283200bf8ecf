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

#include "sfm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>

#include "sfm/error.hpp"

namespace sfm {

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double quantile_linear(std::span<const double> v, double p) {
  if (v.empty()) throw DegenerateError("quantile of an empty sample");
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  p = std::clamp(p, 0.0, 1.0);
  const double h = (static_cast<double>(s.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

double quantile_inverse_ecdf(std::span<const double> v, double p) {
  if (v.empty()) throw DegenerateError("quantile of an empty sample");
  std::vector<double> s(v.begin(), v.end());
  const auto n = s.size();
  std::size_t k = 0;
  if (p > 0.0) {
    k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
    k = std::clamp<std::size_t>(k, 1, n) - 1;
  }
  std::nth_element(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(k), s.end());
  return s[k];
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double two_sided_p(double z) {
  if (!std::isfinite(z)) return 0.0;
  return std::min(1.0, std::erfc(std::fabs(z) / std::sqrt(2.0)));
}

double chi_square_sf(double x, double df) {
  if (x <= 0.0) return 1.0;
  boost::math::chi_squared_distribution<double> dist(df);
  return boost::math::cdf(boost::math::complement(dist, x));
}

TestResult rank_sum_test(std::span<const double> a, std::span<const double> b) {
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  if (na == 0 || nb == 0) throw DegenerateError("rank-sum test with an empty group");
  struct Item {
    double value;
    bool first;
  };
  std::vector<Item> all;
  all.reserve(na + nb);
  for (double x : a) all.push_back({x, true});
  for (double x : b) all.push_back({x, false});
  std::sort(all.begin(), all.end(),
            [](const Item& l, const Item& r) { return l.value < r.value; });

  double rank_sum_a = 0.0;
  double tie_term = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j + 1 < all.size() && all[j + 1].value == all[i].value) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    for (std::size_t k = i; k <= j; ++k) {
      if (all[k].first) rank_sum_a += avg_rank;
    }
    i = j + 1;
  }
  const double n1 = static_cast<double>(na);
  const double n2 = static_cast<double>(nb);
  const double n = n1 + n2;
  const double u = rank_sum_a - n1 * (n1 + 1.0) / 2.0;
  const double mu = n1 * n2 / 2.0;
  const double var = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  TestResult r;
  r.statistic = u;
  if (var <= 0.0) {
    r.p_value = 1.0;
    return r;
  }
  const double diff = u - mu;
  const double cc = diff > 0 ? 0.5 : (diff < 0 ? -0.5 : 0.0);
  r.p_value = two_sided_p((diff - cc) / std::sqrt(var));
  return r;
}

TestResult chi_square_independence(const std::vector<std::vector<double>>& table) {
  const std::size_t rows = table.size();
  if (rows == 0) throw DegenerateError("chi-square test on an empty table");
  const std::size_t cols = table.front().size();
  std::vector<double> row_sum(rows, 0.0);
  std::vector<double> col_sum(cols, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    if (table[i].size() != cols) throw InternalError("ragged contingency table");
    for (std::size_t j = 0; j < cols; ++j) {
      row_sum[i] += table[i][j];
      col_sum[j] += table[i][j];
      total += table[i][j];
    }
  }
  const auto live_rows = std::count_if(row_sum.begin(), row_sum.end(), [](double s) { return s > 0; });
  const auto live_cols = std::count_if(col_sum.begin(), col_sum.end(), [](double s) { return s > 0; });
  TestResult r;
  if (live_rows < 2 || live_cols < 2) return r;
  double stat = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    if (row_sum[i] <= 0) continue;
    for (std::size_t j = 0; j < cols; ++j) {
      if (col_sum[j] <= 0) continue;
      const double expected = row_sum[i] * col_sum[j] / total;
      const double d = table[i][j] - expected;
      stat += d * d / expected;
    }
  }
  r.statistic = stat;
  r.df = static_cast<double>((live_rows - 1) * (live_cols - 1));
  r.p_value = chi_square_sf(stat, r.df);
  return r;
}

Interval wilson_interval(double k, double n, double z) {
  if (n <= 0) return {0.0, 1.0};
  const double p = k / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

double ks_uniform_distance(std::span<const double> v) {
  std::vector<double> s(v.begin(), v.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double x = std::clamp(s[i], 0.0, 1.0);
    d = std::max(d, static_cast<double>(i + 1) / n - x);
    d = std::max(d, x - static_cast<double>(i) / n);
  }
  return d;
}

}  // namespace sfm
