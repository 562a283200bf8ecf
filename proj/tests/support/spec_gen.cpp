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

#include "spec_gen.hpp"

#include <fmt/format.h>

namespace sfm::testing {

namespace {

double unif(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

std::vector<double> simplex(Rng& rng, std::size_t k, double floor) {
  std::vector<double> p(k);
  double s = 0.0;
  for (auto& v : p) {
    v = floor + rng.uniform();
    s += v;
  }
  for (auto& v : p) v /= s;
  return p;
}

std::vector<std::string> labels(const std::string& stem, std::size_t k) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(fmt::format("{}{}", stem, i));
  return out;
}

// Coefficient rows for variables with the given level counts; level 0 is 0.
std::vector<std::vector<double>> coef_rows(Rng& rng, const std::vector<std::size_t>& levels, double scale) {
  std::vector<std::vector<double>> rows;
  for (std::size_t k : levels) {
    std::vector<double> r(k, 0.0);
    for (std::size_t l = 1; l < k; ++l) r[l] = unif(rng, -scale, scale);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

ScmSpec random_spec(Rng& rng, const SpecShape& shape, const std::string& name) {
  ScmSpec s;
  s.name = name;
  s.latent = {0.5, 0.5};
  if (shape.confounded) {
    const double lo = unif(rng, 0.25, 0.4);
    s.p_x1 = {lo, lo + unif(rng, 0.2, 0.35)};
  } else {
    const double p = unif(rng, 0.35, 0.65);
    s.p_x1 = {p, p};
  }
  std::vector<std::size_t> zl;
  for (int j = 0; j < 2; ++j) {
    ScmConfounder c;
    c.name = fmt::format("Z{}", j + 1);
    const std::size_t k = 2 + rng.below(2);
    c.levels = labels("z", k);
    c.probs = {simplex(rng, k, 0.5), simplex(rng, k, 0.5)};
    zl.push_back(k);
    s.confounders.push_back(std::move(c));
  }

  const Link link = shape.additive ? Link::kIdentity : Link::kLogit;
  std::vector<std::size_t> wl;
  for (int m = 0; m < 2; ++m) {
    ScmMediator med;
    med.name = fmt::format("W{}", m + 1);
    med.link = link;
    const std::size_t k = shape.additive ? 2 : 2 + rng.below(2);
    med.levels = labels("w", k);
    for (std::size_t l = 1; l < k; ++l) {
      LinearIndex ix;
      if (shape.additive) {
        ix.base = unif(rng, 0.3, 0.45);
        ix.x = shape.indirect ? unif(rng, 0.1, 0.2) : 0.0;
        ix.z = coef_rows(rng, zl, 0.1);
        ix.w = coef_rows(rng, wl, 0.1);
      } else {
        ix.base = unif(rng, -0.5, 0.5);
        ix.x = shape.indirect ? unif(rng, 0.5, 1.0) * (rng.bernoulli(0.5) ? 1 : -1) : 0.0;
        ix.z = coef_rows(rng, zl, 0.8);
        ix.w = coef_rows(rng, wl, 0.8);
      }
      med.index.push_back(std::move(ix));
    }
    wl.push_back(k);
    s.mediators.push_back(std::move(med));
  }

  s.outcome_link = link;
  LinearIndex& y = s.outcome_index;
  if (shape.additive) {
    y.base = unif(rng, 0.35, 0.45);
    y.x = shape.direct ? unif(rng, 0.05, 0.1) : 0.0;
    y.z = coef_rows(rng, zl, 0.06);
    y.w = coef_rows(rng, wl, 0.1);
  } else {
    y.base = unif(rng, -1.2, -0.2);
    y.x = shape.direct ? unif(rng, 0.3, 0.8) * (rng.bernoulli(0.5) ? 1 : -1) : 0.0;
    y.z = coef_rows(rng, zl, 0.8);
    y.w = coef_rows(rng, wl, 0.8);
    if (shape.xw != 0.0) {
      y.xw.assign(wl.size(), {});
      y.xw[0].assign(wl[0], 0.0);
      for (std::size_t l = 1; l < wl[0]; ++l) y.xw[0][l] = shape.xw;
    }
  }
  s.additive = shape.additive;
  s.validate();
  return s;
}

ScmSpec demo_spec() {
  ScmSpec s;
  s.name = "demo";
  s.attribute = "group";
  s.minority = "minority";
  s.majority = "majority";
  s.latent = {0.55, 0.45};
  s.p_x1 = {0.8, 0.6};

  ScmConfounder age;
  age.name = "age";
  age.role = "age";
  age.levels = {"40", "60", "70", "82"};
  age.probs = {{0.4, 0.3, 0.2, 0.1}, {0.15, 0.25, 0.3, 0.3}};
  ScmConfounder sex;
  sex.name = "sex";
  sex.levels = {"F", "M"};
  sex.probs = {{0.5, 0.5}, {0.45, 0.55}};
  s.confounders = {age, sex};

  ScmMediator adm;
  adm.name = "admission_type";
  adm.role = "admission";
  adm.levels = {"Medical", "Surgery-Emergency", "Surgery-Elective"};
  {
    LinearIndex emerg;
    emerg.base = -1.0;
    emerg.x = -0.3;
    emerg.z = {{0.0, 0.2, 0.4, 0.5}, {0.0, 0.1}};
    LinearIndex elect;
    elect.base = -1.2;
    elect.x = 0.6;
    elect.z = {{0.0, 0.3, 0.5, 0.2}, {0.0, 0.0}};
    adm.index = {emerg, elect};
  }
  ScmMediator severity;
  severity.name = "severity";
  severity.levels = {"low", "high"};
  {
    LinearIndex ix;
    ix.base = -0.6;
    ix.x = -0.4;
    ix.z = {{0.0, 0.2, 0.5, 0.8}, {0.0, 0.1}};
    ix.w = {{0.0, 0.3, -0.8}};
    severity.index = {ix};
  }
  s.mediators = {adm, severity};

  s.outcome = "death";
  s.outcome_index.base = -2.6;
  s.outcome_index.x = -0.25;
  s.outcome_index.z = {{0.0, 0.5, 0.9, 1.4}, {0.0, 0.15}};
  s.outcome_index.w = {{0.0, 0.4, -0.9}, {0.0, 1.1}};
  s.outcome_index.xz = {{0.0, 0.1, 0.2, 0.3}};
  s.validate();
  return s;
}

ScmSpec product_spec() {
  ScmSpec s;
  s.name = "product";
  s.latent = {0.5, 0.5};
  s.p_x1 = {0.4, 0.6};
  ScmConfounder z;
  z.name = "Z1";
  z.levels = {"z0", "z1"};
  z.probs = {{0.6, 0.4}, {0.4, 0.6}};
  s.confounders = {z};
  ScmMediator w;
  w.name = "W1";
  w.levels = {"w0", "w1"};
  LinearIndex wi;
  wi.base = -1.2;
  wi.x = 2.4;
  wi.z = {{0.0, 0.3}};
  w.index = {wi};
  s.mediators = {w};
  s.outcome_index.base = -1.0;
  s.outcome_index.z = {{0.0, 0.3}};
  s.outcome_index.xw = {{0.0, 1.5}};
  s.validate();
  return s;
}

ScmSpec near_positivity_spec() {
  ScmSpec s;
  s.name = "near-positivity";
  // Latent level 1 is almost always majority and is the only source of z1.
  s.latent = {0.7, 0.3};
  s.p_x1 = {0.5, 0.9995};
  ScmConfounder z;
  z.name = "Z1";
  z.levels = {"z0", "z1"};
  z.probs = {{1.0, 0.0}, {0.0, 1.0}};
  s.confounders = {z};
  ScmMediator w;
  w.name = "W1";
  w.levels = {"w0", "w1"};
  LinearIndex wi;
  wi.x = 0.5;
  wi.z = {{0.0, 0.3}};
  w.index = {wi};
  s.mediators = {w};
  s.outcome_index.base = -0.5;
  s.outcome_index.x = 0.3;
  s.outcome_index.z = {{0.0, 0.4}};
  s.outcome_index.w = {{0.0, 0.6}};
  s.validate();
  return s;
}

}  // namespace sfm::testing
