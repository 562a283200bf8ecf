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

#include "sfm/scm.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>

#include <fmt/format.h>

#include "sfm/error.hpp"
#include "sfm/kernels.hpp"
#include "sfm/rng.hpp"

namespace sfm {

namespace {

using nlohmann::json;

constexpr std::uint64_t kSampleTag = 0x73616d70;  // "samp"
constexpr double kTol = 1e-12;

double coef(const std::vector<std::vector<double>>& table, std::size_t j, int level) {
  if (j >= table.size()) return 0.0;
  const auto& row = table[j];
  return static_cast<std::size_t>(level) < row.size() ? row[static_cast<std::size_t>(level)] : 0.0;
}

double apply_link(Link link, double eta) { return link == Link::kLogit ? 1.0 / (1.0 + std::exp(-eta)) : eta; }

std::string link_name(Link l) { return l == Link::kLogit ? "logit" : "identity"; }

Link parse_link(const std::string& s) {
  if (s == "logit") return Link::kLogit;
  if (s == "identity") return Link::kIdentity;
  throw ConfigError("unknown link '" + s + "' (expected logit or identity)");
}

std::optional<double> numeric_label(const std::string& s) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

bool all_numeric(const std::vector<std::string>& levels) {
  return std::all_of(levels.begin(), levels.end(), [](const std::string& s) { return numeric_label(s).has_value(); });
}

int draw_level(const std::vector<double>& probs, double u) {
  double cum = 0.0;
  for (std::size_t l = 0; l < probs.size(); ++l) {
    cum += probs[l];
    if (u < cum) return static_cast<int>(l);
  }
  return static_cast<int>(probs.size()) - 1;
}

// Calls f(values) for every combination of levels (odometer order).
template <typename F>
void for_each_combo(const std::vector<std::size_t>& cards, F&& f) {
  std::vector<int> v(cards.size(), 0);
  for (auto c : cards) {
    if (c == 0) return;
  }
  while (true) {
    f(static_cast<const std::vector<int>&>(v));
    std::size_t i = 0;
    for (; i < v.size(); ++i) {
      if (static_cast<std::size_t>(++v[i]) < cards[i]) break;
      v[i] = 0;
    }
    if (i == v.size()) return;
  }
}

json index_json(const LinearIndex& ix) {
  json j;
  j["base"] = ix.base;
  if (ix.x != 0.0) j["x"] = ix.x;
  if (!ix.z.empty()) j["z"] = ix.z;
  if (!ix.w.empty()) j["w"] = ix.w;
  if (!ix.xz.empty()) j["xz"] = ix.xz;
  if (!ix.xw.empty()) j["xw"] = ix.xw;
  return j;
}

LinearIndex index_from(const json& j) {
  LinearIndex ix;
  ix.base = j.value("base", 0.0);
  ix.x = j.value("x", 0.0);
  auto table = [&](const char* key) {
    return j.contains(key) ? j.at(key).get<std::vector<std::vector<double>>>() : std::vector<std::vector<double>>{};
  };
  ix.z = table("z");
  ix.w = table("w");
  ix.xz = table("xz");
  ix.xw = table("xw");
  return ix;
}

void check_distribution(const std::vector<double>& p, const std::string& what) {
  double s = 0.0;
  for (double v : p) {
    if (!(v >= -kTol && v <= 1.0 + kTol)) throw ConfigError(what + " has a probability outside [0, 1]");
    s += v;
  }
  if (std::fabs(s - 1.0) > 1e-9) throw ConfigError(what + " does not sum to 1");
}

struct RoleLoc {
  bool found = false;
  bool in_z = true;
  std::size_t index = 0;
};

RoleLoc find_role(const ScmSpec& s, const std::string& role) {
  for (std::size_t j = 0; j < s.confounders.size(); ++j) {
    if (s.confounders[j].role == role) return {true, true, j};
  }
  for (std::size_t k = 0; k < s.mediators.size(); ++k) {
    if (s.mediators[k].role == role) return {true, false, k};
  }
  return {};
}

const std::string& role_label(const ScmSpec& s, const RoleLoc& loc, const std::vector<int>& z, const std::vector<int>& w) {
  return loc.in_z ? s.confounders[loc.index].levels[static_cast<std::size_t>(z[loc.index])]
                  : s.mediators[loc.index].levels[static_cast<std::size_t>(w[loc.index])];
}

}  // namespace

double LinearIndex::eval(int xv, std::span<const int> zv, std::span<const int> wv) const {
  double s = base + (xv == 1 ? x : 0.0);
  for (std::size_t j = 0; j < zv.size(); ++j) s += coef(z, j, zv[j]);
  for (std::size_t k = 0; k < wv.size(); ++k) s += coef(w, k, wv[k]);
  if (xv == 1) {
    for (std::size_t j = 0; j < zv.size(); ++j) s += coef(xz, j, zv[j]);
    for (std::size_t k = 0; k < wv.size(); ++k) s += coef(xw, k, wv[k]);
  }
  return s;
}

bool LinearIndex::has_x_interaction() const {
  auto nonzero = [](const std::vector<std::vector<double>>& t) {
    for (const auto& row : t) {
      for (double v : row) {
        if (v != 0.0) return true;
      }
    }
    return false;
  };
  return nonzero(xz) || nonzero(xw);
}

double ScmSpec::p_y(int x, std::span<const int> z, std::span<const int> w) const {
  return apply_link(outcome_link, outcome_index.eval(x, z, w));
}

std::vector<double> ScmSpec::p_w(std::size_t k, int x, std::span<const int> z, std::span<const int> w) const {
  const ScmMediator& m = mediators[k];
  const auto parents = w.subspan(0, std::min(k, w.size()));
  std::vector<double> p(m.levels.size(), 0.0);
  if (m.link == Link::kLogit) {
    std::vector<double> eta(m.levels.size(), 0.0);
    for (std::size_t l = 1; l < m.levels.size(); ++l) eta[l] = m.index[l - 1].eval(x, z, parents);
    const double top = *std::max_element(eta.begin(), eta.end());
    double s = 0.0;
    for (std::size_t l = 0; l < eta.size(); ++l) s += (p[l] = std::exp(eta[l] - top));
    for (double& v : p) v /= s;
  } else {
    double rest = 1.0;
    for (std::size_t l = 1; l < m.levels.size(); ++l) {
      p[l] = m.index[l - 1].eval(x, z, parents);
      rest -= p[l];
    }
    p[0] = rest;
  }
  return p;
}

void ScmSpec::validate() const {
  if (minority == majority) throw ConfigError("SCM group labels must differ");
  check_distribution(latent, "latent distribution");
  if (p_x1.size() != latent.size()) throw ConfigError("p_x1 needs one entry per latent level");
  for (double p : p_x1) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("p_x1 entries must lie in [0, 1]");
  }
  std::vector<std::size_t> zc;
  for (const auto& c : confounders) {
    if (c.levels.empty()) throw ConfigError("confounder '" + c.name + "' has no levels");
    if (c.probs.size() != latent.size()) throw ConfigError("confounder '" + c.name + "' needs one row per latent level");
    for (const auto& row : c.probs) {
      if (row.size() != c.levels.size()) throw ConfigError("confounder '" + c.name + "' row length mismatch");
      check_distribution(row, "confounder '" + c.name + "'");
    }
    zc.push_back(c.levels.size());
  }
  std::vector<std::size_t> wc;
  for (const auto& m : mediators) {
    if (m.levels.size() < 2) throw ConfigError("mediator '" + m.name + "' needs at least two levels");
    if (m.index.size() != m.levels.size() - 1)
      throw ConfigError("mediator '" + m.name + "' needs one index per non-reference level");
    wc.push_back(m.levels.size());
  }
  if (additive) {
    if (outcome_link != Link::kIdentity || outcome_index.has_x_interaction())
      throw ConfigError("additive SCM requires an identity outcome link without x interactions");
    for (const auto& m : mediators) {
      if (m.link != Link::kIdentity) throw ConfigError("additive SCM requires identity mediator links");
      for (const auto& ix : m.index) {
        if (ix.has_x_interaction()) throw ConfigError("additive SCM forbids x interactions in mediators");
      }
    }
  }
  for_each_combo(zc, [&](const std::vector<int>& z) {
    for (int x = 0; x < 2; ++x) {
      for_each_combo(wc, [&](const std::vector<int>& w) {
        for (std::size_t k = 0; k < mediators.size(); ++k)
          check_distribution(p_w(k, x, z, w), "mediator '" + mediators[k].name + "'");
        const double py = p_y(x, z, w);
        if (!(py >= -kTol && py <= 1.0 + kTol)) throw ConfigError("outcome probability outside [0, 1]");
      });
    }
  });
}

double ScmSpec::pi_x0(std::span<const int> z) const {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t u = 0; u < latent.size(); ++u) {
    double pz = latent[u];
    for (std::size_t j = 0; j < z.size(); ++j) pz *= confounders[j].probs[u][static_cast<std::size_t>(z[j])];
    num += pz * (1.0 - p_x1[u]);
    den += pz;
  }
  return num / den;
}

double ScmSpec::rho_x0(std::span<const int> z, std::span<const int> w) const {
  auto pw = [&](int x) {
    double p = 1.0;
    for (std::size_t k = 0; k < mediators.size(); ++k) p *= p_w(k, x, z, w)[static_cast<std::size_t>(w[k])];
    return p;
  };
  const double p0 = pi_x0(z);
  const double a = p0 * pw(0);
  const double b = (1.0 - p0) * pw(1);
  return a / (a + b);
}

RoleSchema ScmSpec::schema() const {
  RoleSchema s;
  s.attribute_column = attribute;
  s.minority_level = minority;
  s.majority_level = majority;
  for (const auto& c : confounders) s.confounder_columns.push_back(c.name);
  for (const auto& m : mediators) s.mediator_columns.push_back(m.name);
  s.outcome_column = outcome;
  auto assign = [&](const std::string& role, std::optional<std::string>& slot) {
    const RoleLoc loc = find_role(*this, role);
    if (loc.found) slot = loc.in_z ? confounders[loc.index].name : mediators[loc.index].name;
  };
  assign("age", s.age_column);
  assign("admission", s.admission_type_column);
  return s;
}

nlohmann::json ScmSpec::to_json() const {
  json j;
  j["name"] = name;
  j["attribute"] = {{"name", attribute}, {"minority", minority}, {"majority", majority}};
  j["latent"] = latent;
  j["p_x1"] = p_x1;
  j["confounders"] = json::array();
  for (const auto& c : confounders) {
    json cj = {{"name", c.name}, {"levels", c.levels}, {"probs", c.probs}};
    if (!c.role.empty()) cj["role"] = c.role;
    j["confounders"].push_back(cj);
  }
  j["mediators"] = json::array();
  for (const auto& m : mediators) {
    json mj = {{"name", m.name}, {"levels", m.levels}, {"link", link_name(m.link)}};
    if (!m.role.empty()) mj["role"] = m.role;
    mj["index"] = json::array();
    for (const auto& ix : m.index) mj["index"].push_back(index_json(ix));
    j["mediators"].push_back(mj);
  }
  j["outcome"] = {{"name", outcome}, {"link", link_name(outcome_link)}, {"index", index_json(outcome_index)}};
  j["additive"] = additive;
  return j;
}

ScmSpec ScmSpec::from_json(const nlohmann::json& j) {
  try {
    ScmSpec s;
    s.name = j.value("name", std::string("scm"));
    if (j.contains("attribute")) {
      const auto& a = j.at("attribute");
      s.attribute = a.value("name", s.attribute);
      s.minority = a.value("minority", s.minority);
      s.majority = a.value("majority", s.majority);
    }
    s.latent = j.at("latent").get<std::vector<double>>();
    s.p_x1 = j.at("p_x1").get<std::vector<double>>();
    for (const auto& cj : j.value("confounders", json::array())) {
      ScmConfounder c;
      c.name = cj.at("name").get<std::string>();
      c.levels = cj.at("levels").get<std::vector<std::string>>();
      c.role = cj.value("role", std::string{});
      c.probs = cj.at("probs").get<std::vector<std::vector<double>>>();
      s.confounders.push_back(std::move(c));
    }
    for (const auto& mj : j.value("mediators", json::array())) {
      ScmMediator m;
      m.name = mj.at("name").get<std::string>();
      m.levels = mj.at("levels").get<std::vector<std::string>>();
      m.role = mj.value("role", std::string{});
      m.link = parse_link(mj.value("link", std::string("logit")));
      for (const auto& ij : mj.at("index")) m.index.push_back(index_from(ij));
      s.mediators.push_back(std::move(m));
    }
    const auto& oj = j.at("outcome");
    s.outcome = oj.value("name", s.outcome);
    s.outcome_link = parse_link(oj.value("link", std::string("logit")));
    s.outcome_index = index_from(oj.at("index"));
    s.additive = j.value("additive", false);
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed SCM specification: ") + e.what());
  }
}

ScmSpec ScmSpec::load(const std::string& path) {
  const std::string text = read_text_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse SCM specification '" + path + "': " + e.what());
  }
  return from_json(j);
}

void ScmSpec::save(const std::string& path) const { write_text_file(path, to_json().dump(2) + "\n"); }

ScmSample sample_units(const ScmSpec& spec, std::size_t n, std::uint64_t seed) {
  spec.validate();
  const std::size_t nz = spec.confounders.size();
  const std::size_t nw = spec.mediators.size();
  ScmSample s;
  s.x.resize(n);
  s.z.resize(n * nz);
  s.u_w.resize(n * nw);
  s.u_y.resize(n);
  std::vector<int> wcode(n * nw);
  std::vector<std::uint8_t> y(n);
  const std::size_t chunks = (n + kernels::kChunk - 1) / kernels::kChunk;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(chunks); ++k) {
    Rng rng(derive_seed(seed, kSampleTag, static_cast<std::uint64_t>(k)));
    const std::size_t begin = static_cast<std::size_t>(k) * kernels::kChunk;
    const std::size_t end = std::min(n, begin + kernels::kChunk);
    for (std::size_t r = begin; r < end; ++r) {
      const auto uc = static_cast<std::size_t>(draw_level(spec.latent, rng.uniform()));
      const int x = rng.uniform() < spec.p_x1[uc] ? 1 : 0;
      std::span<int> z(s.z.data() + r * nz, nz);
      for (std::size_t j = 0; j < nz; ++j) z[j] = draw_level(spec.confounders[j].probs[uc], rng.uniform());
      std::span<int> w(wcode.data() + r * nw, nw);
      for (std::size_t m = 0; m < nw; ++m) {
        const double u = rng.uniform();
        s.u_w[r * nw + m] = u;
        w[m] = draw_level(spec.p_w(m, x, z, w), u);
      }
      s.u_y[r] = rng.uniform();
      s.x[r] = static_cast<std::int8_t>(x);
      y[r] = s.u_y[r] < spec.p_y(x, z, w) ? 1 : 0;
    }
  }

  std::vector<Column> cols;
  {
    std::vector<std::string> cells(n);
    for (std::size_t r = 0; r < n; ++r) cells[r] = s.x[r] == 0 ? spec.minority : spec.majority;
    cols.push_back(Column::make_categorical(spec.attribute, cells));
  }
  auto add_discrete = [&](const std::string& name, const std::vector<std::string>& levels, const int* codes,
                          std::size_t stride) {
    if (all_numeric(levels)) {
      std::vector<double> v(n);
      for (std::size_t r = 0; r < n; ++r) v[r] = *numeric_label(levels[static_cast<std::size_t>(codes[r * stride])]);
      cols.push_back(Column::make_numeric(name, std::move(v)));
    } else {
      std::vector<std::string> cells(n);
      for (std::size_t r = 0; r < n; ++r) cells[r] = levels[static_cast<std::size_t>(codes[r * stride])];
      cols.push_back(Column::make_categorical(name, cells));
    }
  };
  for (std::size_t j = 0; j < nz; ++j) add_discrete(spec.confounders[j].name, spec.confounders[j].levels, s.z.data() + j, nz);
  for (std::size_t m = 0; m < nw; ++m) add_discrete(spec.mediators[m].name, spec.mediators[m].levels, wcode.data() + m, nw);
  {
    std::vector<double> v(n);
    for (std::size_t r = 0; r < n; ++r) v[r] = y[r];
    cols.push_back(Column::make_numeric(spec.outcome, std::move(v)));
  }
  s.data = SfmDataset(spec.schema(), std::move(cols), {}, fmt::format("{}:n={}:seed={}", spec.name, n, seed));
  return s;
}

SfmDataset sample_dataset(const ScmSpec& spec, std::size_t n, std::uint64_t seed) {
  return sample_units(spec, n, seed).data;
}

double empirical_ctf(const ScmSpec& spec, const ScmSample& sample, int a, int b, int c) {
  const std::size_t nz = spec.confounders.size();
  const std::size_t nw = spec.mediators.size();
  std::vector<int> w(nw);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t r = 0; r < sample.x.size(); ++r) {
    if (sample.x[r] != c) continue;
    std::span<const int> z(sample.z.data() + r * nz, nz);
    for (std::size_t m = 0; m < nw; ++m) w[m] = draw_level(spec.p_w(m, a, z, w), sample.u_w[r * nw + m]);
    sum += sample.u_y[r] < spec.p_y(b, z, w) ? 1.0 : 0.0;
    ++count;
  }
  if (count == 0) throw DegenerateError("no sampled units in the conditioning group");
  return sum / static_cast<double>(count);
}

nlohmann::json OracleEffects::to_json() const {
  json j;
  json psi_j;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int c = 0; c < 2; ++c) psi_j[fmt::format("{}{}{}", a, b, c)] = arm(a, b, c);
    }
  }
  j["psi"] = psi_j;
  j["p_x1"] = p_x1;
  j["forward"] = {{"tv", tv}, {"direct", direct}, {"indirect_negated", indirect_negated},
                  {"confounded_negated", confounded_negated}};
  j["reverse"] = {{"tv", tv}, {"direct", direct_rev}, {"indirect_negated", indirect_rev},
                  {"confounded_negated", confounded_rev}};
  auto nullable = [](const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(std::isfinite(x) ? json(x) : json(nullptr));
    return a;
  };
  if (!de_cells.empty()) j["de_cells"] = nullable(de_cells);
  if (!ie_bins.empty()) j["ie_bins"] = nullable(ie_bins);
  return j;
}

OracleEffects oracle_effects(const ScmSpec& spec, const CellGrid* grid) {
  spec.validate();
  std::vector<std::size_t> zc;
  for (const auto& c : spec.confounders) zc.push_back(c.levels.size());
  std::vector<std::size_t> wc;
  for (const auto& m : spec.mediators) wc.push_back(m.levels.size());

  RoleLoc age_loc;
  RoleLoc adm_loc;
  if (grid) {
    grid->validate();
    age_loc = find_role(spec, "age");
    adm_loc = find_role(spec, "admission");
    if (!age_loc.found || !adm_loc.found) throw ConfigError("cell oracles need SCM variables with roles age and admission");
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const std::size_t cells = grid ? grid->rows() * grid->cols() : 0;
  std::vector<double> de_num(cells, 0.0), de_mass(cells, 0.0);
  const std::size_t bins = grid ? grid->rows() : 0;
  std::vector<double> ie_num(bins, 0.0), ie_mass(bins, 0.0);

  double num[8] = {};
  double pc[2] = {0.0, 0.0};
  for_each_combo(zc, [&](const std::vector<int>& z) {
    // Joint weight of (X = c, Z = z).
    double wxz[2] = {0.0, 0.0};
    for (std::size_t u = 0; u < spec.latent.size(); ++u) {
      double pz = spec.latent[u];
      for (std::size_t j = 0; j < z.size(); ++j) pz *= spec.confounders[j].probs[u][static_cast<std::size_t>(z[j])];
      wxz[0] += pz * (1.0 - spec.p_x1[u]);
      wxz[1] += pz * spec.p_x1[u];
    }
    pc[0] += wxz[0];
    pc[1] += wxz[1];
    std::optional<std::size_t> z_bin;
    if (grid && age_loc.in_z) {
      const auto age = numeric_label(spec.confounders[age_loc.index].levels[static_cast<std::size_t>(z[age_loc.index])]);
      if (age) z_bin = grid->bin_of(*age);
    }
    double e[2][2] = {};  // e[a][b] = sum_w P(w | a, z) p_y(b, z, w)
    for_each_combo(wc, [&](const std::vector<int>& w) {
      double pw[2] = {1.0, 1.0};
      for (int a = 0; a < 2; ++a) {
        for (std::size_t k = 0; k < w.size(); ++k) pw[a] *= spec.p_w(k, a, z, w)[static_cast<std::size_t>(w[k])];
      }
      const double py[2] = {spec.p_y(0, z, w), spec.p_y(1, z, w)};
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) e[a][b] += pw[a] * py[b];
      }
      if (grid) {
        const auto age = numeric_label(role_label(spec, age_loc, z, w));
        const auto bin = age ? grid->bin_of(*age) : std::nullopt;
        const auto type = grid->type_of(role_label(spec, adm_loc, z, w));
        if (bin && type) {
          const std::size_t cell = *bin * grid->cols() + *type;
          const double mass = wxz[0] * pw[0];
          de_mass[cell] += mass;
          de_num[cell] += mass * (py[1] - py[0]);
        }
        if (z_bin) ie_num[*z_bin] += wxz[0] * (pw[1] - pw[0]) * py[1];
      }
    });
    if (z_bin) ie_mass[*z_bin] += wxz[0];
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        for (int c = 0; c < 2; ++c) num[a * 4 + b * 2 + c] += wxz[c] * e[a][b];
      }
    }
  });

  OracleEffects o;
  o.p_x1 = pc[1];
  for (int i = 0; i < 8; ++i) {
    const int c = i & 1;
    o.psi[i] = pc[c] > 0.0 ? num[i] / pc[c] : nan;
  }
  o.tv = o.arm(1, 1, 1) - o.arm(0, 0, 0);
  o.direct = o.arm(0, 1, 0) - o.arm(0, 0, 0);
  o.indirect_negated = o.arm(1, 1, 0) - o.arm(0, 1, 0);
  o.confounded_negated = o.arm(1, 1, 1) - o.arm(1, 1, 0);
  o.direct_rev = o.arm(1, 1, 0) - o.arm(1, 0, 0);
  o.indirect_rev = o.arm(1, 0, 0) - o.arm(0, 0, 0);
  o.confounded_rev = o.confounded_negated;
  if (grid) {
    o.de_cells.resize(cells);
    o.de_cell_mass = de_mass;
    for (std::size_t i = 0; i < cells; ++i) o.de_cells[i] = de_mass[i] > 0.0 ? de_num[i] / de_mass[i] : nan;
    if (age_loc.in_z) {
      o.ie_bins.resize(bins);
      for (std::size_t b = 0; b < bins; ++b) o.ie_bins[b] = ie_mass[b] > 0.0 ? ie_num[b] / ie_mass[b] : nan;
    }
  }
  return o;
}

}  // namespace sfm
