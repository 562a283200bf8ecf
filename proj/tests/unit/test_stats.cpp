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

#include <doctest.h>

#include <cmath>
#include <vector>

#include "sfm/stats.hpp"

using namespace sfm;

TEST_CASE("mean and sample sd") {
  const std::vector<double> v = {2, 4, 4, 4, 5, 5, 7, 9};
  CHECK(mean(v) == doctest::Approx(5.0));
  CHECK(sample_sd(v) == doctest::Approx(std::sqrt(32.0 / 7.0)));
  CHECK(sample_sd(std::vector<double>{3.0}) == 0.0);
}

TEST_CASE("quantile definitions") {
  const std::vector<double> v = {10, 20, 30, 40};
  CHECK(quantile_linear(v, 0.5) == doctest::Approx(25.0));
  CHECK(quantile_linear(v, 0.0) == 10.0);
  CHECK(quantile_linear(v, 1.0) == 40.0);
  // type 1: smallest x with F_n(x) >= p
  CHECK(quantile_inverse_ecdf(v, 0.25) == 10.0);
  CHECK(quantile_inverse_ecdf(v, 0.26) == 20.0);
  CHECK(quantile_inverse_ecdf(v, 0.0) == 10.0);
  CHECK(quantile_inverse_ecdf(v, 1.0) == 40.0);
}

TEST_CASE("normal tail helpers") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
  CHECK(normal_cdf(kZ975) == doctest::Approx(0.975).epsilon(1e-9));
  CHECK(two_sided_p(kZ975) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(two_sided_p(-1.0) == doctest::Approx(std::erfc(1.0 / std::sqrt(2.0))));
}

TEST_CASE("chi-square upper tail") {
  // df = 2 has survival exp(-x / 2).
  for (double x : {0.5, 1.0, 3.0, 9.0}) CHECK(chi_square_sf(x, 2.0) == doctest::Approx(std::exp(-x / 2)));
  CHECK(chi_square_sf(3.841458820694124, 1.0) == doctest::Approx(0.05).epsilon(1e-8));
}

TEST_CASE("chi-square independence on a 2x2 table") {
  const std::vector<std::vector<double>> t = {{10, 20}, {30, 40}};
  // Expected counts 12, 18, 28, 42.
  const double x2 = 4.0 / 12 + 4.0 / 18 + 4.0 / 28 + 4.0 / 42;
  const auto r = chi_square_independence(t);
  CHECK(r.statistic == doctest::Approx(x2));
  CHECK(r.df == 1.0);
  CHECK(r.p_value == doctest::Approx(chi_square_sf(x2, 1.0)));
}

TEST_CASE("chi-square drops empty rows") {
  const auto r = chi_square_independence({{10, 20}, {0, 0}, {30, 40}});
  CHECK(r.df == 1.0);
}

TEST_CASE("rank-sum without ties") {
  const std::vector<double> a = {1, 2, 3};
  const std::vector<double> b = {4, 5, 6, 7};
  // W = 6, E = 12, var = 3*4*8/12 = 8, continuity 0.5.
  const double z = (6.0 - 12.0 + 0.5) / std::sqrt(8.0);
  const auto r = rank_sum_test(a, b);
  CHECK(r.p_value == doctest::Approx(two_sided_p(z)));
}

TEST_CASE("Wilson interval") {
  const auto ci = wilson_interval(5, 10);
  const double z = kZ975;
  const double centre = (0.5 + z * z / 20) / (1 + z * z / 10);
  const double half = z * std::sqrt(0.25 / 10 + z * z / 400) / (1 + z * z / 10);
  CHECK(ci.lo == doctest::Approx(centre - half));
  CHECK(ci.hi == doctest::Approx(centre + half));
}

TEST_CASE("KS distance to the uniform") {
  CHECK(ks_uniform_distance(std::vector<double>{0.5}) == doctest::Approx(0.5));
  CHECK(ks_uniform_distance(std::vector<double>{0.25, 0.75}) == doctest::Approx(0.25));
}
