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

#include "sfm/interaction.hpp"
#include "sfm/stats.hpp"
#include "spec_gen.hpp"

using namespace sfm;

namespace {

ArmTable synthetic_arms(std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  ArmTable t;
  for (auto& e : t.psi) {
    std::vector<double> infl(n);
    for (auto& v : infl) v = rng.uniform() - 0.5;
    e = CtfEstimate::from_influence(rng.uniform(), infl);
  }
  return t;
}

double psi(const ArmTable& t, int a, int b, int c) { return t.arm(a, b, c).value; }

}  // namespace

TEST_CASE("statistics follow their contrasts") {
  const ArmTable t = synthetic_arms(1, 200);
  const InteractionReport r = test_interactions(t, 0.05);
  REQUIRE(r.rows.size() == 5);
  CHECK(r.rows[0].name == "TE*SE");
  CHECK(r.row("TE*SE").statistic ==
        doctest::Approx((psi(t, 1, 1, 0) - psi(t, 0, 0, 0)) - (psi(t, 1, 1, 1) - psi(t, 0, 0, 1))));
  CHECK(r.row("DE*IE").statistic ==
        doctest::Approx((psi(t, 0, 1, 0) - psi(t, 0, 0, 0)) - (psi(t, 1, 1, 0) - psi(t, 1, 0, 0))));
  CHECK(r.row("DE*SE").statistic ==
        doctest::Approx((psi(t, 0, 1, 0) - psi(t, 0, 0, 0)) - (psi(t, 0, 1, 1) - psi(t, 0, 0, 1))));
  CHECK(r.row("IE*SE").statistic ==
        doctest::Approx((psi(t, 1, 1, 0) - psi(t, 0, 1, 0)) - (psi(t, 1, 1, 1) - psi(t, 0, 1, 1))));
  auto asym = [&](int c) { return psi(t, 0, 1, c) - psi(t, 0, 0, c) - psi(t, 1, 1, c) + psi(t, 1, 0, c); };
  CHECK(r.row("DE*IE*SE").statistic == doctest::Approx(asym(0) - asym(1)));

  // se from the row-wise combined influence
  std::vector<double> infl(200);
  for (std::size_t i = 0; i < 200; ++i) {
    infl[i] = t.arm(0, 1, 0).influence[i] - t.arm(0, 0, 0).influence[i] - t.arm(1, 1, 0).influence[i] +
              t.arm(1, 0, 0).influence[i];
  }
  const auto& de_ie = r.row("DE*IE");
  CHECK(de_ie.se == doctest::Approx(sample_sd(infl) / std::sqrt(200.0)));
  CHECK(de_ie.z == doctest::Approx(de_ie.statistic / de_ie.se));
  CHECK(de_ie.p_value == doctest::Approx(two_sided_p(de_ie.z)));
  CHECK(de_ie.reject == (de_ie.p_value < 0.05));
}

TEST_CASE("zero influence variance is flagged, not divided") {
  ArmTable t;
  for (auto& e : t.psi) e = CtfEstimate::from_influence(0.3, std::vector<double>(10, 0.0));
  const InteractionReport r = test_interactions(t);
  for (const auto& row : r.rows) {
    CHECK(row.degenerate);
    CHECK(row.p_value == 1.0);
    CHECK_FALSE(row.reject);
  }
}

TEST_CASE("unknown row name") { CHECK_THROWS(test_interactions(synthetic_arms(2, 10)).row("XX")); }

TEST_CASE("additive mechanisms have zero interaction contrasts at the oracle") {
  Rng rng(4);
  testing::SpecShape shape;
  shape.additive = true;
  for (int i = 0; i < 5; ++i) {
    const ScmSpec spec = testing::random_spec(rng, shape, "add");
    const OracleEffects o = oracle_effects(spec);
    ArmTable t;
    for (int k = 0; k < 8; ++k) t.psi[static_cast<std::size_t>(k)] = CtfEstimate::from_influence(o.psi[k], {1.0, -1.0});
    for (const auto& row : test_interactions(t).rows) CHECK(std::abs(row.statistic) < 1e-12);
  }
}

TEST_CASE("an X by W product shows up at the oracle") {
  const ScmSpec spec = testing::product_spec();
  const OracleEffects o = oracle_effects(spec);
  const double de_ie = (o.arm(0, 1, 0) - o.arm(0, 0, 0)) - (o.arm(1, 1, 0) - o.arm(1, 0, 0));
  CHECK(std::abs(de_ie) > 0.05);
}
