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

#include "sfm/report.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace sfm::report {

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json interval(const Interval& i) { return json::array({number(i.lo), number(i.hi)}); }

std::string ci_text(const Interval& i, int digits = 4) { return "[" + num(i.lo, digits) + ", " + num(i.hi, digits) + "]"; }

std::string csv_number(double v) { return std::isfinite(v) ? fmt::format("{}", v) : std::string{}; }

}  // namespace

std::string num(double v, int digits) {
  if (!std::isfinite(v)) return "NA";
  std::string s = fmt::format("{:.{}f}", v, digits);
  // Avoid printing a negative zero.
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

json to_json(const CtfEstimate& e) {
  return {{"estimate", number(e.value)}, {"se", number(e.se)}, {"ci95", interval(e.ci95)}, {"truncated", e.truncated}};
}

json to_json(const TvDecomposition& d) {
  json j;
  j["orientation"] = d.reverse ? "reverse" : "forward";
  j["components"] = {{"tv", to_json(d.tv)},
                     {"direct", to_json(d.direct)},
                     {"indirect_negated", to_json(d.indirect_negated)},
                     {"confounded_negated", to_json(d.confounded_negated)}};
  j["n"] = {{"x0", d.n_x0}, {"x1", d.n_x1}};
  j["telescoping_residual"] =
      number(d.direct.value + d.indirect_negated.value + d.confounded_negated.value - d.tv.value);
  j["meta"] = {{"dataset", d.meta.dataset_id}, {"learner", d.meta.learner}, {"seed", d.meta.seed},
               {"folds", d.meta.folds},        {"clip", d.meta.clip},       {"clipped_predictions", d.meta.clipped},
               {"truncated_arms", d.meta.truncations}};
  return j;
}

json to_json(const InteractionReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"test", row.name},
                    {"statistic", number(row.statistic)},
                    {"se", number(row.se)},
                    {"z", number(row.z)},
                    {"p_value", number(row.p_value)},
                    {"reject", row.reject},
                    {"degenerate_variance", row.degenerate}});
  }
  return {{"alpha", r.alpha}, {"tests", rows}};
}

json to_json(const Heatmap& h) {
  json cells = json::array();
  for (std::size_t b = 0; b < h.grid.rows(); ++b) {
    for (std::size_t t = 0; t < h.grid.cols(); ++t) {
      const std::size_t i = h.index(b, t);
      cells.push_back({{"bin", h.grid.age_bins[b].label()},
                       {"type", h.grid.admission_types[t]},
                       {"estimate", number(h.value[i])},
                       {"ci95", json::array({number(h.ci_lo[i]), number(h.ci_hi[i])})},
                       {"n", h.n[i]},
                       {"masked", h.masked[i] != 0}});
    }
  }
  return {{"cells", cells}, {"notes", h.notes}};
}

json to_json(const std::vector<BinEstimate>& bins) {
  json a = json::array();
  for (const auto& b : bins) {
    a.push_back({{"bin", b.bin.label()}, {"estimate", number(b.value)}, {"ci95", interval(b.ci)}, {"n", b.n},
                 {"masked", b.masked}});
  }
  return a;
}

json to_json(const MechanismProfiles& p) {
  auto cells = [&](const std::vector<ProportionCell>& v) {
    json a = json::array();
    for (std::size_t b = 0; b < v.size(); ++b) {
      a.push_back({{"bin", p.bins[b].label()}, {"k", v[b].k}, {"n", v[b].n}, {"share", number(v[b].share)},
                   {"ci95", interval(v[b].ci)}, {"masked", v[b].masked}});
    }
    return a;
  };
  return {{"urgent_share", {{"minority", cells(p.urgent_share[0])}, {"majority", cells(p.urgent_share[1])}}},
          {"mortality", {{"elective", cells(p.mortality[0])}, {"urgent", cells(p.mortality[1])}}}};
}

json to_json(const CorrelationResult& c) {
  return {{"rho", number(c.rho)}, {"ci95", interval(c.ci)}, {"cells", c.cells},
          {"replicates", c.replicates},
          {"warnings", c.warnings}};
}

json to_json(const RiskRatio& rr) {
  return {{"rr", number(rr.rr)},
          {"risk_minority", number(rr.risk[0])},
          {"risk_majority", number(rr.risk[1])},
          {"ci95", interval(rr.ci)},
          {"admissions", rr.admissions},
          {"replicates", rr.replicates}};
}

json to_json(const RadarTable& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"area", row.area}, {"rr", number(row.rr)}, {"excess_pct", number(100.0 * row.excess)},
                    {"category", radar_category_name(row.category)}});
  }
  return {{"areas", rows}, {"excluded", r.excluded}};
}

json to_json(const OverlapReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"q", row.q},
                    {"threshold", number(row.threshold)},
                    {"removed", row.removed},
                    {"retained", row.retained},
                    {"bound", number(row.bound)},
                    {"violation", row.violation},
                    {"decomposition", to_json(row.decomposition)}});
  }
  return {{"alpha", r.alpha},
          {"propensity_floor", r.floor},
          {"bound_method", "DKW lower confidence bound on the e_min quantile"},
          {"baseline", to_json(r.baseline)},
          {"quantiles", rows}};
}

json to_json(const MissingnessReport& r) {
  json draws = json::array();
  for (const auto& d : r.per_draw) draws.push_back(to_json(d));
  json pooled = json::object();
  for (const auto& p : r.pooled) {
    pooled[p.name] = {{"estimate", number(p.estimate)}, {"within", number(p.within)}, {"between", number(p.between)},
                      {"total_variance", number(p.total)}, {"se", number(p.se)}, {"ci95", interval(p.ci)}};
  }
  return {{"draws", r.draws}, {"missing_rows", r.missing}, {"pooled", pooled}, {"complete_case", to_json(r.complete_case)},
          {"per_draw", draws}};
}

json to_json(const CohortSummary& s) {
  json j;
  j["groups"] = json::array();
  for (const auto& g : s.groups) j["groups"].push_back({{"label", g.label}, {"n", g.n}, {"percent", g.percent}});
  j["attribute_missing"] = s.attribute_missing;
  j["variables"] = json::array();
  for (const auto& v : s.variables) {
    json vj = {{"name", v.name}, {"test", v.test}, {"p_value", number(v.p_value)}};
    if (v.kind == ColumnKind::kNumeric) {
      vj["kind"] = "numeric";
      vj["groups"] = json::array();
      for (const auto& g : v.numeric) {
        vj["groups"].push_back({{"n", g.n}, {"median", number(g.median)}, {"q1", number(g.q1)}, {"q3", number(g.q3)},
                                {"mean", number(g.mean)}});
      }
    } else {
      vj["kind"] = "categorical";
      vj["levels"] = json::array();
      for (const auto& l : v.levels) {
        vj["levels"].push_back({{"level", l.level}, {"count", l.count}, {"percent", {number(l.percent[0]), number(l.percent[1])}}});
      }
    }
    j["variables"].push_back(vj);
  }
  return j;
}

std::string aligned_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size(), 0);
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size() && c < width.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  auto line = [&](const std::vector<std::string>& r) {
    std::string out;
    for (std::size_t c = 0; c < width.size(); ++c) {
      const std::string cell = c < r.size() ? r[c] : std::string{};
      if (c) out += "  ";
      out += c == 0 ? fmt::format("{:<{}}", cell, width[c]) : fmt::format("{:>{}}", cell, width[c]);
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out + "\n";
  };
  std::string out = line(header);
  std::size_t total = 0;
  for (auto w : width) total += w;
  out += std::string(total + 2 * (width.size() - 1), '-') + "\n";
  for (const auto& r : rows) out += line(r);
  return out;
}

std::string text(const TvDecomposition& d) {
  std::vector<std::vector<std::string>> rows;
  auto add = [&](const char* name, const CtfEstimate& e) {
    rows.push_back({name, num(e.value), num(e.se), ci_text(e.ci95)});
  };
  add("tv", d.tv);
  add("direct", d.direct);
  add("indirect_negated", d.indirect_negated);
  add("confounded_negated", d.confounded_negated);
  std::string out = fmt::format("{} decomposition (n_x0 = {}, n_x1 = {})\n", d.reverse ? "Reverse" : "Forward", d.n_x0, d.n_x1);
  return out + aligned_table({"component", "estimate", "se", "ci95"}, rows);
}

std::string text(const InteractionReport& r) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& row : r.rows) {
    std::string p = num(row.p_value, 4) + (row.reject ? "*" : "");
    if (row.degenerate) p += " (degenerate)";
    rows.push_back({row.name, num(row.statistic), num(row.se), num(row.z, 3), p});
  }
  return fmt::format("Interaction tests (alpha = {:g})\n", r.alpha) +
         aligned_table({"test", "statistic", "se", "z", "p"}, rows);
}

std::string text(const Heatmap& h, const std::string& title) {
  std::vector<std::string> header{"age"};
  for (const auto& t : h.grid.admission_types) header.push_back(t);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t b = 0; b < h.grid.rows(); ++b) {
    std::vector<std::string> row{h.grid.age_bins[b].label()};
    for (std::size_t t = 0; t < h.grid.cols(); ++t) {
      const std::size_t i = h.index(b, t);
      row.push_back(h.masked[i] ? "masked" : num(h.value[i]) + " " + ci_text({h.ci_lo[i], h.ci_hi[i]}, 3));
    }
    rows.push_back(std::move(row));
  }
  std::string out = title + "\n" + aligned_table(header, rows);
  for (const auto& n : h.notes) out += "note: " + n + "\n";
  return out;
}

std::string text(const std::vector<BinEstimate>& bins) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& b : bins) {
    rows.push_back({b.bin.label(), b.masked ? "masked" : num(b.value), b.masked ? "" : ci_text(b.ci), std::to_string(b.n)});
  }
  return "Indirect effect by age\n" + aligned_table({"age", "estimate", "ci95", "n_x0"}, rows);
}

std::string text(const RadarTable& r) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& row : r.rows) {
    rows.push_back({row.area, num(row.rr, 3), num(100.0 * row.excess, 1), radar_category_name(row.category)});
  }
  std::string out = "Risk radar\n" + aligned_table({"area", "rr", "excess_pct", "category"}, rows);
  for (const auto& e : r.excluded) out += "excluded: " + e + "\n";
  return out;
}

std::string text(const OverlapReport& r) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& row : r.rows) {
    const auto& d = row.decomposition;
    rows.push_back({fmt::format("{:g}", row.q), num(row.threshold), std::to_string(row.removed), num(row.bound),
                    row.violation ? "yes" : "no", num(d.tv.value), num(d.direct.value), num(d.indirect_negated.value),
                    num(d.confounded_negated.value)});
  }
  return "Overlap sensitivity\n" +
         aligned_table({"q", "threshold", "removed", "bound", "violation", "tv", "direct", "indirect_neg", "confounded_neg"},
                       rows);
}

std::string text(const MissingnessReport& r) {
  std::vector<std::vector<std::string>> rows;
  const CtfEstimate* cc[4] = {&r.complete_case.tv, &r.complete_case.direct, &r.complete_case.indirect_negated,
                              &r.complete_case.confounded_negated};
  for (std::size_t i = 0; i < r.pooled.size(); ++i) {
    const auto& p = r.pooled[i];
    rows.push_back({p.name, num(p.estimate), num(p.se), ci_text(p.ci), num(p.between, 6), num(cc[i]->value)});
  }
  return fmt::format("Missingness sensitivity ({} draws, {} rows imputed)\n", r.draws, r.missing) +
         aligned_table({"component", "pooled", "se", "ci95", "between_var", "complete_case"}, rows);
}

std::string text(const CohortSummary& s) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"n", fmt::format("{} ({}%)", s.groups[0].n, num(s.groups[0].percent, 1)),
                  fmt::format("{} ({}%)", s.groups[1].n, num(s.groups[1].percent, 1)), ""});
  for (const auto& v : s.variables) {
    if (v.kind == ColumnKind::kNumeric) {
      auto cell = [](const NumericGroupStats& g) { return fmt::format("{} ({}-{})", num(g.median, 2), num(g.q1, 2), num(g.q3, 2)); };
      rows.push_back({v.name, cell(v.numeric[0]), cell(v.numeric[1]), num(v.p_value, 4)});
      continue;
    }
    rows.push_back({v.name, "", "", num(v.p_value, 4)});
    for (const auto& l : v.levels) {
      rows.push_back({"  " + l.level, fmt::format("{} ({}%)", l.count[0], num(l.percent[0], 1)),
                      fmt::format("{} ({}%)", l.count[1], num(l.percent[1], 1)), ""});
    }
  }
  return "Cohort summary\n" + aligned_table({"variable", s.groups[0].label, s.groups[1].label, "p"}, rows);
}

std::string heatmap_csv(const Heatmap& h) {
  std::string out = "bin,type,estimate,ci_lo,ci_hi,n,masked\n";
  for (std::size_t b = 0; b < h.grid.rows(); ++b) {
    for (std::size_t t = 0; t < h.grid.cols(); ++t) {
      const std::size_t i = h.index(b, t);
      out += fmt::format("{},{},{},{},{},{},{}\n", h.grid.age_bins[b].label(), quote_field(h.grid.admission_types[t], ','),
                         csv_number(h.value[i]), csv_number(h.ci_lo[i]), csv_number(h.ci_hi[i]), h.n[i], h.masked[i] ? 1 : 0);
    }
  }
  return out;
}

std::string radar_csv(const RadarTable& r) {
  std::string out = "area,rr,excess_pct,category\n";
  for (const auto& row : r.rows) {
    out += fmt::format("{},{},{},{}\n", quote_field(row.area, ','), csv_number(row.rr), csv_number(100.0 * row.excess),
                       radar_category_name(row.category));
  }
  return out;
}

}  // namespace sfm::report
