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

#include "sfm/heterogeneity.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "sfm/config.hpp"
#include "sfm/error.hpp"
#include "sfm/kernels.hpp"
#include "sfm/rng.hpp"

namespace sfm {

namespace {

constexpr std::uint64_t kCellBootTag = 0x63656c6c;  // "cell"
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double parse_number(std::string_view text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || p != end) return kNaN;
  return v;
}

// Numeric age per row (NaN when missing or unparseable).
std::vector<double> age_values(const SfmDataset& ds) {
  const auto& name = ds.schema().age_column;
  if (!name) throw ConfigError("no age column configured");
  const Column& col = ds.column(*name);
  std::vector<double> out(ds.n_rows(), kNaN);
  for (std::size_t r = 0; r < ds.n_rows(); ++r) {
    if (col.is_missing(r)) continue;
    out[r] = col.kind == ColumnKind::kNumeric ? col.numeric[r] : parse_number(col.levels[static_cast<std::size_t>(col.codes[r])]);
  }
  return out;
}

std::vector<std::string> admission_values(const SfmDataset& ds) {
  const auto& name = ds.schema().admission_type_column;
  if (!name) throw ConfigError("no admission type column configured");
  const Column& col = ds.column(*name);
  std::vector<std::string> out(ds.n_rows());
  for (std::size_t r = 0; r < ds.n_rows(); ++r) out[r] = col.cell_text(r);
  return out;
}

struct CellStat {
  double value = kNaN;
  Interval ci{kNaN, kNaN};
  std::size_t n_x0 = 0;
  bool masked = true;
};

// sum(contrib) / #x0 over `rows`, with a row bootstrap.
CellStat cell_estimate(const std::vector<std::size_t>& rows, const std::vector<double>& contrib,
                       const std::vector<std::int8_t>& x, const CellBootstrap& boot, std::uint64_t stream) {
  CellStat s;
  for (auto r : rows) s.n_x0 += x[r] == 0 ? 1 : 0;
  if (s.n_x0 < std::max<std::size_t>(boot.floor, 1)) return s;
  s.masked = false;
  double total = 0.0;
  for (auto r : rows) total += contrib[r];
  s.value = total / static_cast<double>(s.n_x0);
  s.ci = {s.value, s.value};
  if (boot.replicates < 2) return s;
  std::vector<double> reps;
  reps.reserve(static_cast<std::size_t>(boot.replicates));
  const std::size_t m = rows.size();
  for (int b = 0; b < boot.replicates; ++b) {
    Rng rng(derive_seed(boot.seed, stream, static_cast<std::uint64_t>(b)));
    double sum = 0.0;
    std::size_t k0 = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t r = rows[rng.below(m)];
      sum += contrib[r];
      k0 += x[r] == 0 ? 1 : 0;
    }
    if (k0 > 0) reps.push_back(sum / static_cast<double>(k0));
  }
  const double sd = sample_sd(reps);
  s.ci = {s.value - kZ975 * sd, s.value + kZ975 * sd};
  return s;
}

std::vector<std::int8_t> observed_attribute(const SfmDataset& ds) {
  auto x = ds.attribute();
  for (auto v : x) {
    if (v < 0) throw ValidationError("heterogeneity estimates require an observed attribute on every row");
  }
  return x;
}

}  // namespace

std::string AgeBin::label() const { return fmt::format("{:g}-{:g}", lo, hi); }

void CellGrid::validate() const {
  if (age_bins.empty()) throw ConfigError("cell grid needs at least one age bin");
  if (admission_types.empty()) throw ConfigError("cell grid needs at least one admission type");
  for (std::size_t i = 0; i < age_bins.size(); ++i) {
    if (!(age_bins[i].lo <= age_bins[i].hi)) throw ConfigError("age bin " + age_bins[i].label() + " is empty");
    if (i > 0 && !(age_bins[i - 1].hi < age_bins[i].lo))
      throw ConfigError("age bins must be ordered and disjoint");
  }
  for (std::size_t i = 0; i < admission_types.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (admission_types[i] == admission_types[j])
        throw ConfigError("duplicate admission type '" + admission_types[i] + "'");
    }
  }
}

std::optional<std::size_t> CellGrid::bin_of(double age) const {
  for (std::size_t i = 0; i < age_bins.size(); ++i) {
    if (age_bins[i].contains(age)) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> CellGrid::type_of(const std::string& type) const {
  for (std::size_t i = 0; i < admission_types.size(); ++i) {
    if (admission_types[i] == type) return i;
  }
  return std::nullopt;
}

std::vector<AgeBin> CellGrid::default_effect_bins() { return {{18, 54}, {55, 64}, {65, 74}, {75, 100}}; }
std::vector<AgeBin> CellGrid::default_risk_bins() { return {{18, 49}, {50, 64}, {65, 74}, {75, 100}}; }
std::vector<std::string> CellGrid::default_admission_types() {
  return {"Medical", "Surgery-Emergency", "Surgery-Elective"};
}

std::vector<AgeBin> CellGrid::parse_bins(const std::string& text) {
  std::vector<AgeBin> bins;
  for (const auto& item : split_list(text)) {
    const auto dash = item.find('-', 1);
    if (dash == std::string::npos) throw ConfigError("age bin '" + item + "' is not of the form lo-hi");
    const double lo = parse_number(item.substr(0, dash));
    const double hi = parse_number(item.substr(dash + 1));
    if (std::isnan(lo) || std::isnan(hi)) throw ConfigError("age bin '" + item + "' is not numeric");
    bins.push_back({lo, hi});
  }
  return bins;
}

Heatmap Heatmap::empty_for(const CellGrid& grid) {
  grid.validate();
  Heatmap h;
  h.grid = grid;
  const std::size_t cells = grid.rows() * grid.cols();
  h.value.assign(cells, kNaN);
  h.ci_lo.assign(cells, kNaN);
  h.ci_hi.assign(cells, kNaN);
  h.n.assign(cells, 0);
  h.masked.assign(cells, 1);
  return h;
}

Heatmap conditional_direct_effect(const SfmDataset& ds, const NuisanceFits& fits, const CellGrid& grid,
                                  const CellBootstrap& boot) {
  Heatmap h = Heatmap::empty_for(grid);
  const auto x = observed_attribute(ds);
  if (fits.n_rows() != ds.n_rows()) throw InternalError("nuisance fits do not match the dataset");
  const auto y = ds.outcome(fits.outcome);
  const auto age = age_values(ds);
  const auto type = admission_values(ds);

  std::vector<double> contrib(ds.n_rows());
  for (std::size_t i = 0; i < ds.n_rows(); ++i) {
    const double mu1 = fits.mu[1][i];
    if (x[i] == 0) {
      contrib[i] = mu1 - y[i];
    } else {
      const double r0 = fits.rho0[i];
      contrib[i] = r0 / (1.0 - r0) * (y[i] - mu1);
    }
  }
  std::vector<std::vector<std::size_t>> rows(h.size());
  for (std::size_t i = 0; i < ds.n_rows(); ++i) {
    if (std::isnan(age[i])) continue;
    const auto b = grid.bin_of(age[i]);
    const auto t = grid.type_of(type[i]);
    if (b && t) rows[h.index(*b, *t)].push_back(i);
  }
  for (std::size_t cell = 0; cell < h.size(); ++cell) {
    const CellStat s = cell_estimate(rows[cell], contrib, x, boot, kCellBootTag + cell);
    h.n[cell] = s.n_x0;
    h.masked[cell] = s.masked ? 1 : 0;
    h.value[cell] = s.value;
    h.ci_lo[cell] = s.ci.lo;
    h.ci_hi[cell] = s.ci.hi;
    if (s.masked) {
      const std::size_t b = cell / grid.cols();
      h.notes.push_back(fmt::format("cell {} x {} masked: {} x0 rows (floor {})", grid.age_bins[b].label(),
                                    grid.admission_types[cell % grid.cols()], s.n_x0, boot.floor));
    }
  }
  return h;
}

std::vector<BinEstimate> conditional_indirect_effect(const SfmDataset& ds, const NuisanceFits& fits,
                                                     const std::vector<AgeBin>& bins, const CellBootstrap& boot) {
  CellGrid grid{bins, {"all"}};
  grid.validate();
  const auto& age_col = ds.schema().age_column;
  if (!age_col) throw ConfigError("no age column configured");
  const auto& z = ds.schema().confounder_columns;
  if (std::find(z.begin(), z.end(), *age_col) == z.end())
    throw ConfigError("indirect effects by age need age among the confounders");
  const auto x = observed_attribute(ds);
  if (fits.n_rows() != ds.n_rows()) throw InternalError("nuisance fits do not match the dataset");
  const auto y = ds.outcome(fits.outcome);
  const auto age = age_values(ds);

  const std::size_t n = ds.n_rows();
  std::vector<double> hi(n);
  std::vector<double> lo(n);
  kernels::PseudoOutcomeInputs in{x, y, fits.mu[1], fits.eta[1][1], fits.rho0, fits.pi0, 1, 1, 0};
  kernels::pseudo_outcome(in, hi);
  in.a = 0;
  in.eta_ab = fits.eta[0][1];
  kernels::pseudo_outcome(in, lo);
  std::vector<double> contrib(n);
  for (std::size_t i = 0; i < n; ++i) contrib[i] = hi[i] - lo[i];

  std::vector<std::vector<std::size_t>> rows(bins.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isnan(age[i])) continue;
    if (const auto b = grid.bin_of(age[i])) rows[*b].push_back(i);
  }
  std::vector<BinEstimate> out;
  for (std::size_t b = 0; b < bins.size(); ++b) {
    const CellStat s = cell_estimate(rows[b], contrib, x, boot, kCellBootTag + 1000 + b);
    out.push_back({bins[b], s.value, s.ci, s.n_x0, s.masked});
  }
  return out;
}

MechanismProfiles mechanism_profiles(const SfmDataset& ds, const std::vector<AgeBin>& bins,
                                     const std::string& elective_level) {
  CellGrid grid{bins, {"all"}};
  grid.validate();
  const auto x = ds.attribute();
  const auto y = ds.outcome();
  const auto age = age_values(ds);
  const auto type = admission_values(ds);
  const std::size_t nb = bins.size();
  std::vector<std::size_t> k_urgent[2], n_group[2], deaths[2], n_urg[2];
  for (int g = 0; g < 2; ++g) {
    k_urgent[g].assign(nb, 0);
    n_group[g].assign(nb, 0);
    deaths[g].assign(nb, 0);
    n_urg[g].assign(nb, 0);
  }
  for (std::size_t i = 0; i < ds.n_rows(); ++i) {
    if (std::isnan(age[i]) || type[i].empty()) continue;
    const auto b = grid.bin_of(age[i]);
    if (!b) continue;
    const int urgent = type[i] == elective_level ? 0 : 1;
    if (x[i] >= 0) {
      ++n_group[x[i]][*b];
      k_urgent[x[i]][*b] += static_cast<std::size_t>(urgent);
    }
    ++n_urg[urgent][*b];
    deaths[urgent][*b] += y[i] > 0.5 ? 1 : 0;
  }
  auto cell = [](std::size_t k, std::size_t n) {
    ProportionCell c;
    c.k = k;
    c.n = n;
    if (n == 0) {
      c.masked = true;
      c.share = kNaN;
      c.ci = {kNaN, kNaN};
      return c;
    }
    c.share = static_cast<double>(k) / static_cast<double>(n);
    c.ci = wilson_interval(static_cast<double>(k), static_cast<double>(n));
    return c;
  };
  MechanismProfiles p;
  p.bins = bins;
  for (int g = 0; g < 2; ++g) {
    for (std::size_t b = 0; b < nb; ++b) {
      p.urgent_share[g].push_back(cell(k_urgent[g][b], n_group[g][b]));
      p.mortality[g].push_back(cell(deaths[g][b], n_urg[g][b]));
    }
  }
  return p;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) throw DegenerateError("correlation needs at least two paired cells");
  const double ma = mean(a);
  const double mb = mean(b);
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) throw DegenerateError("correlation undefined: a heatmap has zero variance");
  return sab / std::sqrt(saa * sbb);
}

namespace {

void paired_cells(const Heatmap& h, const Heatmap& l, bool negate_l, std::vector<double>& a, std::vector<double>& b) {
  if (h.grid.rows() != l.grid.rows() || h.grid.cols() != l.grid.cols() || h.size() != l.size())
    throw ConfigError("heatmaps must share a grid");
  a.clear();
  b.clear();
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (h.masked[i] || l.masked[i] || !std::isfinite(h.value[i]) || !std::isfinite(l.value[i])) continue;
    a.push_back(h.value[i]);
    b.push_back(negate_l ? -l.value[i] : l.value[i]);
  }
}

}  // namespace

CorrelationResult heatmap_correlation(const Heatmap& h, const Heatmap& l, bool negate_l,
                                      const HeatmapReplicate& replicate, int replicates) {
  std::vector<double> a;
  std::vector<double> b;
  paired_cells(h, l, negate_l, a, b);
  CorrelationResult res;
  res.cells = a.size();
  if (a.size() < h.size())
    res.warnings.push_back(fmt::format("{} of {} cells masked; using pairwise-complete cells", h.size() - a.size(), h.size()));
  res.rho = pearson(a, b);
  res.ci = {res.rho, res.rho};
  if (!replicate || replicates < 2) return res;
  std::vector<double> reps;
  std::size_t skipped = 0;
  for (int i = 0; i < replicates; ++i) {
    const auto [hb, lb] = replicate(i);
    paired_cells(hb, lb, negate_l, a, b);
    try {
      reps.push_back(pearson(a, b));
    } catch (const DegenerateError&) {
      ++skipped;
    }
  }
  if (skipped > 0) res.warnings.push_back(fmt::format("{} bootstrap replicates had undefined correlation", skipped));
  res.replicates = static_cast<int>(reps.size());
  if (reps.size() >= 2) {
    const double sd = sample_sd(reps);
    res.ci = {std::max(-1.0, res.rho - kZ975 * sd), std::min(1.0, res.rho + kZ975 * sd)};
  }
  return res;
}

}  // namespace sfm
