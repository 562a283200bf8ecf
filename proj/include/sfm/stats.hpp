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
#include <span>
#include <vector>

namespace sfm {

inline constexpr double kZ975 = 1.959963984540054;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

double mean(std::span<const double> v);
// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
double sample_sd(std::span<const double> v);

// Linear-interpolation quantile (Hyndman-Fan type 7).
double quantile_linear(std::span<const double> v, double p);
// Inverse empirical CDF (type 1): smallest x with F_n(x) >= p; p <= 0 gives
// the minimum.
double quantile_inverse_ecdf(std::span<const double> v, double p);

double normal_cdf(double z);
// Two-sided p-value of a standard normal statistic.
double two_sided_p(double z);
// Upper tail of a chi-square distribution.
double chi_square_sf(double x, double df);

struct TestResult {
  double statistic = 0.0;
  double df = 0.0;
  double p_value = 1.0;
};

// Wilcoxon rank-sum with normal approximation, tie and continuity correction.
TestResult rank_sum_test(std::span<const double> a, std::span<const double> b);

// Pearson chi-square test of independence on an r x c table (row-major),
// without continuity correction. Rows or columns summing to zero are dropped.
TestResult chi_square_independence(const std::vector<std::vector<double>>& table);

// Wilson score interval for k successes of n.
Interval wilson_interval(double k, double n, double z = kZ975);

// Kolmogorov-Smirnov distance between the empirical CDF of `v` and U(0,1).
double ks_uniform_distance(std::span<const double> v);

}  // namespace sfm
