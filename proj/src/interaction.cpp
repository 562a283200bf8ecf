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

#include "sfm/interaction.hpp"

#include <cmath>

#include "sfm/error.hpp"
#include "sfm/stats.hpp"

namespace sfm {

namespace {

using Terms = std::vector<std::pair<double, const CtfEstimate*>>;

InteractionRow z_test(std::string name, const Terms& terms, double alpha) {
  const CtfEstimate e = combine(terms);
  InteractionRow row;
  row.name = std::move(name);
  row.statistic = e.value;
  row.se = e.se;
  if (!(e.se > 1e-12)) {
    row.degenerate = true;
    row.p_value = 1.0;
    return row;
  }
  row.z = e.value / e.se;
  row.p_value = two_sided_p(row.z);
  row.reject = row.p_value < alpha;
  return row;
}

}  // namespace

const InteractionRow& InteractionReport::row(const std::string& name) const {
  for (const auto& r : rows) {
    if (r.name == name) return r;
  }
  throw ConfigError("unknown interaction test '" + name + "'");
}

InteractionReport test_interactions(const ArmTable& t, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  auto p = [&](int a, int b, int c) { return &t.arm(a, b, c); };
  InteractionReport rep;
  rep.alpha = alpha;
  rep.rows.push_back(z_test("TE*SE", {{1, p(1, 1, 0)}, {-1, p(0, 0, 0)}, {-1, p(1, 1, 1)}, {1, p(0, 0, 1)}}, alpha));
  rep.rows.push_back(z_test("DE*IE", {{1, p(0, 1, 0)}, {-1, p(0, 0, 0)}, {-1, p(1, 1, 0)}, {1, p(1, 0, 0)}}, alpha));
  rep.rows.push_back(z_test("DE*SE", {{1, p(0, 1, 0)}, {-1, p(0, 0, 0)}, {-1, p(0, 1, 1)}, {1, p(0, 0, 1)}}, alpha));
  rep.rows.push_back(z_test("IE*SE", {{1, p(1, 1, 0)}, {-1, p(0, 1, 0)}, {-1, p(1, 1, 1)}, {1, p(0, 1, 1)}}, alpha));
  Terms three;
  for (int c = 0; c < 2; ++c) {
    const double s = c == 0 ? 1.0 : -1.0;
    three.push_back({s, p(0, 1, c)});
    three.push_back({-s, p(0, 0, c)});
    three.push_back({-s, p(1, 1, c)});
    three.push_back({s, p(1, 0, c)});
  }
  rep.rows.push_back(z_test("DE*IE*SE", three, alpha));
  return rep;
}

InteractionReport test_interactions(const SfmDataset& ds, const NuisanceFits& fits, double alpha) {
  return test_interactions(estimate_all_arms(ds, fits), alpha);
}

}  // namespace sfm
