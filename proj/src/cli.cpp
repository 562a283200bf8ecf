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

#include "sfm/cli.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "sfm/ctf.hpp"
#include "sfm/dataset.hpp"
#include "sfm/error.hpp"
#include "sfm/heterogeneity.hpp"
#include "sfm/interaction.hpp"
#include "sfm/popn_risk.hpp"
#include "sfm/report.hpp"
#include "sfm/rng.hpp"
#include "sfm/scm.hpp"
#include "sfm/sensitivity.hpp"
#include "sfm/summary.hpp"

namespace sfm::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr std::uint64_t kCorrelationTag = 0x636f7272;  // "corr"

const std::vector<std::pair<std::string, std::string>>& commands() {
  static const std::vector<std::pair<std::string, std::string>> list = {
      {"decompose", "TV decomposition, forward and reverse"},
      {"interactions", "pathway interaction tests"},
      {"heterogeneity", "direct-effect heatmap, indirect effect by age, mechanism profiles"},
      {"riskratio", "census-anchored admission risk ratios and heatmap"},
      {"radar", "area-level risk radar"},
      {"sensitivity-overlap", "propensity trimming and overlap bound"},
      {"sensitivity-missing", "multiple imputation of a missing attribute"},
      {"simulate", "sample a dataset and exact effects from an SCM specification"},
      {"summary", "cohort characteristics by group"},
  };
  return list;
}

// ---------------------------------------------------------------- parsing

std::string dashed(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

std::string env_name(const std::string& key) {
  std::string s = "SFM_" + key;
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

double to_double(const Settings& s, const std::string& key) {
  const std::string& v = s.at(key);
  double out = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size())
    throw ConfigError(fmt::format("setting {} = '{}' is not a number", key, v));
  return out;
}

long long to_int(const Settings& s, const std::string& key) {
  const std::string& v = s.at(key);
  long long out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size())
    throw ConfigError(fmt::format("setting {} = '{}' is not an integer", key, v));
  return out;
}

std::uint64_t to_u64(const Settings& s, const std::string& key) {
  const std::string& v = s.at(key);
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size())
    throw ConfigError(fmt::format("setting {} = '{}' is not a non-negative integer", key, v));
  return out;
}

bool to_bool(const Settings& s, const std::string& key) {
  const std::string& v = s.at(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no" || v.empty()) return false;
  throw ConfigError(fmt::format("setting {} = '{}' is not a boolean", key, v));
}

std::vector<double> to_doubles(const Settings& s, const std::string& key) {
  std::vector<double> out;
  for (const auto& item : split_list(s.at(key))) {
    Settings one{{key, item}};
    out.push_back(to_double(one, key));
  }
  return out;
}

std::vector<int> to_ints(const Settings& s, const std::string& key) {
  std::vector<int> out;
  for (const auto& item : split_list(s.at(key))) {
    Settings one{{key, item}};
    out.push_back(static_cast<int>(to_int(one, key)));
  }
  return out;
}

const std::string& require(const Settings& s, const std::string& key) {
  const std::string& v = s.at(key);
  if (v.empty()) throw ConfigError(fmt::format("--{} is required for this command", dashed(key)));
  return v;
}

LearnerSpec learner_from(const Settings& s) {
  LearnerSpec spec;
  spec.kind = LearnerSpec::parse_kind(s.at("learner"));
  spec.trees = static_cast<int>(to_int(s, "trees"));
  spec.depth = static_cast<int>(to_int(s, "depth"));
  spec.learning_rate = to_double(s, "learning_rate");
  spec.min_leaf = static_cast<int>(to_int(s, "min_leaf"));
  spec.l2 = to_double(s, "l2");
  spec.validate();
  return spec;
}

PipelineOptions pipeline_from(const Settings& s) {
  PipelineOptions o;
  o.spec = learner_from(s);
  o.folds = static_cast<int>(to_int(s, "folds"));
  o.seed = to_u64(s, "seed");
  o.clip = to_double(s, "clip");
  return o;
}

std::vector<AgeBin> bins_from(const Settings& s, std::vector<AgeBin> fallback) {
  const std::string& v = s.at("bins");
  return v.empty() ? fallback : CellGrid::parse_bins(v);
}

CellGrid grid_from(const Settings& s, std::vector<AgeBin> fallback) {
  CellGrid g{bins_from(s, std::move(fallback)), split_list(s.at("types"))};
  g.validate();
  return g;
}

// ---------------------------------------------------------------- output

struct Output {
  fs::path dir;
  std::vector<std::string> files;

  void write(const std::string& name, const std::string& text) {
    write_text_file((dir / name).string(), text);
    files.push_back(name);
  }
  void emit(const std::string& stem, const json& j, const std::string& txt) {
    write(stem + ".json", j.dump(2) + "\n");
    write(stem + ".txt", txt);
  }
};

Output open_output(const Settings& s) {
  const fs::path dir = require(s, "out");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir.string() + "'");
  return {dir, {}};
}

json manifest_json(const Invocation& inv) {
  json settings = json::object();
  for (const auto& [k, v] : inv.settings) {
    if (k != "out" && k != "config") settings[k] = v;
  }
  json columns = json::object();
  if (const auto it = inv.columns.sections().find("columns"); it != inv.columns.sections().end()) {
    for (const auto& [k, v] : it->second) columns[k] = v;
  }
  return {{"tool", "sfm"}, {"version", SFM_VERSION}, {"command", inv.command}, {"settings", settings}, {"columns", columns}};
}

// ---------------------------------------------------------------- data

SfmDataset load_data(const Invocation& inv) {
  const Settings& s = inv.settings;
  const std::string& path = require(s, "data");
  if (!inv.columns.has_section("columns")) throw ConfigError("no [columns] section: pass --config naming the data roles");
  const RoleSchema schema = schema_from_config(inv.columns);
  const LoadOptions options = load_options_from_config(inv.columns);
  SfmDataset ds = load_dataset(path, schema, options);
  const auto rules_text = split_list(s.at("filters"), ';');
  if (!rules_text.empty()) {
    std::vector<FilterRule> rules;
    for (const auto& r : rules_text) rules.push_back(FilterRule::parse(r));
    ds = filter_cohort(ds, rules).dataset;
  }
  const std::string& outcome = s.at("outcome");
  if (outcome.empty() || outcome == schema.outcome_column) return ds;
  if (outcome == "readmission") {
    if (!schema.readmission_column) throw ConfigError("outcome = readmission but no readmission column is configured");
    return ds.with_outcome(*schema.readmission_column);
  }
  return ds.with_outcome(outcome);
}

struct Estimation {
  SfmDataset data;
  NuisanceFits fits;
  std::size_t dropped = 0;
};

Estimation estimation_inputs(const Invocation& inv) {
  SfmDataset full = load_data(inv);
  Estimation e;
  e.dropped = full.attribute_missing_count();
  e.data = full.complete_attribute();
  e.fits = fit_for(e.data, pipeline_from(inv.settings));
  return e;
}

struct RiskInputs {
  CensusTable census;
  AdmissionCounts admissions;
  std::vector<int> years;
};

RiskInputs risk_inputs(const Invocation& inv) {
  const Settings& s = inv.settings;
  const CensusTable raw = CensusTable::load(require(s, "census"));
  RiskInputs in;
  if (!s.at("admissions").empty()) {
    in.admissions = AdmissionCounts::load(s.at("admissions"));
  } else if (!s.at("data").empty()) {
    in.admissions = count_admissions(load_data(inv), raw.age_groups());
  } else {
    throw ConfigError("--admissions or --data is required for this command");
  }
  in.years = split_list(s.at("years")).empty() ? in.admissions.years() : to_ints(s, "years");
  if (in.years.empty()) in.years = raw.years();
  in.census = interpolate_population(raw, in.years);
  return in;
}

// ---------------------------------------------------------------- commands

void cmd_decompose(const Invocation& inv, Output& out) {
  const Estimation e = estimation_inputs(inv);
  const ArmTable arms = estimate_all_arms(e.data, e.fits);
  TvDecomposition fwd = decompose_tv(e.data, e.fits);
  TvDecomposition rev = decompose_tv_reverse(e.data, e.fits);
  json psi = json::object();
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int c = 0; c < 2; ++c) {
        json pj = report::to_json(arms.arm(a, b, c));
        pj["plugin"] = plugin_ctf_mean(e.data, e.fits, {a, b, c, {}});
        psi[fmt::format("{}{}{}", a, b, c)] = pj;
      }
    }
  }
  json j = {{"forward", report::to_json(fwd)}, {"reverse", report::to_json(rev)}, {"psi", psi},
            {"rows_without_attribute", e.dropped}};
  out.emit("decomposition", j, report::text(fwd) + "\n" + report::text(rev));
}

void cmd_interactions(const Invocation& inv, Output& out) {
  const Estimation e = estimation_inputs(inv);
  const InteractionReport rep = test_interactions(e.data, e.fits, to_double(inv.settings, "alpha"));
  out.emit("interactions", report::to_json(rep), report::text(rep));
}

void cmd_heterogeneity(const Invocation& inv, Output& out) {
  const Settings& s = inv.settings;
  const Estimation e = estimation_inputs(inv);
  const CellGrid grid = grid_from(s, CellGrid::default_effect_bins());
  CellBootstrap boot;
  boot.replicates = static_cast<int>(to_int(s, "bootstrap"));
  boot.seed = to_u64(s, "seed");
  const Heatmap de = conditional_direct_effect(e.data, e.fits, grid, boot);
  out.write("de_heatmap.csv", report::heatmap_csv(de));
  json j = {{"direct_effect", report::to_json(de)},
            {"estimator", "cell-averaged doubly robust pseudo-outcomes (no causal forest)"}};
  std::string txt = report::text(de, "Direct effect by age x admission type");

  const auto& z = e.data.schema().confounder_columns;
  const auto& age = e.data.schema().age_column;
  if (age && std::find(z.begin(), z.end(), *age) != z.end()) {
    const auto ie = conditional_indirect_effect(e.data, e.fits, grid.age_bins, boot);
    j["indirect_by_age"] = report::to_json(ie);
    txt += "\n" + report::text(ie);
  } else {
    j["indirect_by_age"] = nullptr;
    txt += "\nIndirect effect by age skipped: age is not a confounder\n";
  }
  j["mechanism_profiles"] = report::to_json(mechanism_profiles(e.data, grid.age_bins, s.at("elective")));

  if (!s.at("census").empty()) {
    const CensusTable raw = CensusTable::load(s.at("census"));
    const auto groups = raw.age_groups();
    const AdmissionCounts adm = count_admissions(e.data, groups);
    std::vector<int> years = split_list(s.at("years")).empty() ? adm.years() : to_ints(s, "years");
    const CensusTable census = interpolate_population(raw, years);
    const Heatmap rr = rr_heatmap(census, adm, grid, years, std::nullopt, {0, 0});
    out.write("rr_heatmap.csv", report::heatmap_csv(rr));
    const int reps = boot.replicates;
    const std::uint64_t seed = boot.seed;
    const HeatmapReplicate replicate = [&](int i) {
      Rng rng(derive_seed(seed, kCorrelationTag, static_cast<std::uint64_t>(i)));
      std::vector<std::size_t> rows(e.data.n_rows());
      for (auto& r : rows) r = rng.below(e.data.n_rows());
      const SfmDataset ds_b = e.data.subset(rows);
      const NuisanceFits fits_b = subset_fits(e.fits, rows);
      CellBootstrap none = boot;
      none.replicates = 0;
      const AdmissionCounts adm_b = count_admissions(ds_b, groups);
      return std::pair{conditional_direct_effect(ds_b, fits_b, grid, none),
                       rr_heatmap(census, adm_b, grid, years, std::nullopt, {0, 0})};
    };
    const CorrelationResult corr = heatmap_correlation(de, rr, to_bool(s, "negate"), replicate, reps);
    j["risk_ratio"] = report::to_json(rr);
    j["correlation"] = report::to_json(corr);
    txt += "\n" + report::text(rr, "Admission risk ratio") +
           fmt::format("\nCorrelation rho = {} {}\n", report::num(corr.rho),
                       "[" + report::num(corr.ci.lo) + ", " + report::num(corr.ci.hi) + "]");
  }
  out.emit("heterogeneity", j, txt);
}

void cmd_riskratio(const Invocation& inv, Output& out) {
  const Settings& s = inv.settings;
  const RiskInputs in = risk_inputs(inv);
  RiskBootstrap boot{static_cast<int>(to_int(s, "bootstrap")), to_u64(s, "seed")};
  json rows = json::array();
  std::vector<std::vector<std::string>> table;
  std::vector<std::string> types = split_list(s.at("types"));
  std::vector<std::pair<std::string, std::vector<std::string>>> sets;
  for (const auto& t : types) sets.push_back({t, {t}});
  sets.push_back({"all", {}});
  for (std::size_t i = 0; i < sets.size(); ++i) {
    RiskBootstrap b = boot;
    b.seed = derive_seed(boot.seed, i);
    json rj = {{"diagnosis", sets[i].first}};
    try {
      const RiskRatio rr = risk_ratio(in.census, in.admissions, {std::nullopt, in.years, std::nullopt}, sets[i].second, b);
      rj.update(report::to_json(rr));
      table.push_back({sets[i].first, report::num(rr.rr, 3),
                       "[" + report::num(rr.ci.lo, 3) + ", " + report::num(rr.ci.hi, 3) + "]",
                       report::num(rr.risk[0], 6), report::num(rr.risk[1], 6)});
    } catch (const DegenerateError& e) {
      rj["error"] = e.what();
      table.push_back({sets[i].first, "NA", "", "", ""});
    }
    rows.push_back(rj);
  }
  const CellGrid grid = grid_from(s, CellGrid::default_risk_bins());
  const Heatmap h = rr_heatmap(in.census, in.admissions, grid, in.years, std::nullopt, boot);
  out.write("rr_heatmap.csv", report::heatmap_csv(h));
  out.write("census_interpolated.csv", in.census.format());
  json j = {{"years", in.years}, {"risk_ratios", rows}, {"heatmap", report::to_json(h)}, {"census_warnings", in.census.warnings}};
  const std::string txt = "Admission risk ratios (minority / majority)\n" +
                          report::aligned_table({"diagnosis", "rr", "ci95", "risk_minority", "risk_majority"}, table) +
                          "\n" + report::text(h, "Risk ratio by age x admission type");
  out.emit("riskratio", j, txt);
}

void cmd_radar(const Invocation& inv, Output& out) {
  const RiskInputs in = risk_inputs(inv);
  const RadarTable radar = build_radar(in.census, in.admissions, in.years);
  out.write("radar.csv", report::radar_csv(radar));
  json j = report::to_json(radar);
  j["years"] = in.years;
  j["census_warnings"] = in.census.warnings;
  out.emit("radar", j, report::text(radar));
}

void cmd_overlap(const Invocation& inv, Output& out) {
  const Settings& s = inv.settings;
  const Estimation e = estimation_inputs(inv);
  const OverlapReport rep =
      overlap_analysis(e.data, e.fits, to_doubles(s, "quantiles"), pipeline_from(s), to_double(s, "alpha"));
  out.emit("overlap", report::to_json(rep), report::text(rep));
}

void cmd_missing(const Invocation& inv, Output& out) {
  const SfmDataset ds = load_data(inv);
  const MissingnessReport rep =
      missingness_analysis(ds, pipeline_from(inv.settings), static_cast<int>(to_int(inv.settings, "draws")));
  out.emit("missingness", report::to_json(rep), report::text(rep));
}

void cmd_simulate(const Invocation& inv, Output& out) {
  const Settings& s = inv.settings;
  const ScmSpec spec = ScmSpec::load(require(s, "spec"));
  const long long rows = to_int(s, "rows");
  if (rows < 0) throw ConfigError("--rows must be >= 0");
  const SfmDataset ds = sample_dataset(spec, static_cast<std::size_t>(rows), to_u64(s, "seed"));
  out.write("data.csv", format_dataset(ds));

  const RoleSchema schema = spec.schema();
  std::optional<CellGrid> grid;
  if (schema.age_column && schema.admission_type_column) {
    for (const auto& m : spec.mediators) {
      if (m.role == "admission") grid = CellGrid{bins_from(s, CellGrid::default_effect_bins()), m.levels};
    }
    for (const auto& c : spec.confounders) {
      if (c.role == "admission") grid = CellGrid{bins_from(s, CellGrid::default_effect_bins()), c.levels};
    }
  }
  const OracleEffects oracle = oracle_effects(spec, grid ? &*grid : nullptr);
  json oj = oracle.to_json();
  if (grid) {
    json cells = json::array();
    for (std::size_t b = 0; b < grid->rows(); ++b) {
      for (std::size_t t = 0; t < grid->cols(); ++t) cells.push_back({{"bin", grid->age_bins[b].label()}, {"type", grid->admission_types[t]}});
    }
    oj["de_cell_keys"] = cells;
  }
  out.write("oracle.json", oj.dump(2) + "\n");

  IniConfig cfg;
  schema_to_config(schema, cfg);
  out.write("columns.ini", cfg.to_string());
  const std::string txt = fmt::format("Simulated {} rows from '{}'\n", rows, spec.name) +
                          report::aligned_table({"quantity", "oracle"},
                                                {{"tv", report::num(oracle.tv, 6)},
                                                 {"direct", report::num(oracle.direct, 6)},
                                                 {"indirect_negated", report::num(oracle.indirect_negated, 6)},
                                                 {"confounded_negated", report::num(oracle.confounded_negated, 6)}});
  out.write("simulate.txt", txt);
}

void cmd_summary(const Invocation& inv, Output& out) {
  const Settings& s = inv.settings;
  const SfmDataset ds = load_data(inv);
  std::vector<std::string> vars = split_list(s.at("variables"));
  if (vars.empty()) {
    const auto& sc = ds.schema();
    vars = sc.confounder_columns;
    vars.insert(vars.end(), sc.mediator_columns.begin(), sc.mediator_columns.end());
    vars.push_back(sc.outcome_column);
  }
  const CohortSummary sum = summarize_cohort(ds, vars);
  out.emit("summary", report::to_json(sum), report::text(sum));
}

Settings settings_from_manifest(const json& m) {
  Settings s = default_settings();
  for (const auto& [k, v] : m.at("settings").items()) {
    if (!s.count(k)) throw ConfigError("manifest has unknown setting '" + k + "'");
    s[k] = v.get<std::string>();
  }
  return s;
}

}  // namespace

const Settings& default_settings() {
  static const Settings defaults = {
      {"admissions", ""},
      {"alpha", "0.05"},
      {"bins", ""},
      {"bootstrap", "200"},
      {"census", ""},
      {"clip", "0.01"},
      {"config", ""},
      {"data", ""},
      {"depth", "4"},
      {"draws", "10"},
      {"elective", "Surgery-Elective"},
      {"filters", ""},
      {"folds", "5"},
      {"l2", "1"},
      {"learner", "gbt"},
      {"learning_rate", "0.1"},
      {"min_leaf", "20"},
      {"negate", "false"},
      {"out", ""},
      {"outcome", ""},
      {"quantiles", "0,0.01,0.02,0.03,0.04,0.05"},
      {"rows", "1000"},
      {"seed", "1"},
      {"spec", ""},
      {"trees", "150"},
      {"types", "Medical,Surgery-Emergency,Surgery-Elective"},
      {"variables", ""},
      {"years", ""},
  };
  return defaults;
}

int execute(const Invocation& inv, std::ostream& log) {
  Output out = open_output(inv.settings);
  const std::string& c = inv.command;
  if (c == "decompose") {
    cmd_decompose(inv, out);
  } else if (c == "interactions") {
    cmd_interactions(inv, out);
  } else if (c == "heterogeneity") {
    cmd_heterogeneity(inv, out);
  } else if (c == "riskratio") {
    cmd_riskratio(inv, out);
  } else if (c == "radar") {
    cmd_radar(inv, out);
  } else if (c == "sensitivity-overlap") {
    cmd_overlap(inv, out);
  } else if (c == "sensitivity-missing") {
    cmd_missing(inv, out);
  } else if (c == "simulate") {
    cmd_simulate(inv, out);
  } else if (c == "summary") {
    cmd_summary(inv, out);
  } else {
    throw ConfigError("unknown command '" + c + "'");
  }
  out.write("manifest.json", manifest_json(inv).dump(2) + "\n");
  for (const auto& f : out.files) log << (out.dir / f).string() << "\n";
  return 0;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"sfm: causal decomposition of group disparities under the Standard Fairness Model"};
  app.set_version_flag("--version", std::string(SFM_VERSION));
  app.require_subcommand(1);
  app.fallthrough();
  Settings flags;
  std::map<std::string, CLI::Option*> given;
  for (const auto& [key, def] : default_settings()) {
    given[key] = app.add_option("--" + dashed(key), flags[key],
                                fmt::format("(env {}, default '{}')", env_name(key), def));
  }
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : commands()) subs[name] = app.add_subcommand(name, help);
  std::string manifest_path;
  CLI::App* replay = app.add_subcommand("replay", "rerun the command recorded in a manifest.json");
  replay->add_option("manifest", manifest_path, "manifest.json written by an earlier run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ExitCode::kConfig);
  }

  try {
    Invocation inv;
    if (replay->parsed()) {
      json m;
      try {
        m = json::parse(read_text_file(manifest_path));
        inv.command = m.at("command").get<std::string>();
        inv.settings = settings_from_manifest(m);
        for (const auto& [k, v] : m.at("columns").items()) inv.columns.set("columns", k, v.get<std::string>());
      } catch (const json::exception& e) {
        throw ConfigError("malformed manifest '" + manifest_path + "': " + e.what());
      }
      inv.settings["out"] = given["out"]->count() ? flags["out"] : std::string{};
      if (const char* env = std::getenv("SFM_OUT"); env && !given["out"]->count()) inv.settings["out"] = env;
    } else {
      for (const auto& [name, sub] : subs) {
        if (sub->parsed()) inv.command = name;
      }
      Settings s = default_settings();
      std::string config_path = given["config"]->count() ? flags["config"] : std::string{};
      if (config_path.empty()) {
        if (const char* env = std::getenv(env_name("config").c_str())) config_path = env;
      }
      if (!config_path.empty()) {
        inv.columns = IniConfig::load(config_path);
        if (const auto it = inv.columns.sections().find("run"); it != inv.columns.sections().end()) {
          for (const auto& [k, v] : it->second) {
            if (!s.count(k)) throw ConfigError("unknown [run] key '" + k + "' in " + config_path);
            s[k] = v;
          }
        }
      }
      for (const auto& [key, def] : default_settings()) {
        if (const char* env = std::getenv(env_name(key).c_str())) s[key] = env;
        if (given[key]->count()) s[key] = flags[key];
      }
      s["config"] = config_path;
      inv.settings = std::move(s);
    }
    return execute(inv, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kInternal);
  }
}

}  // namespace sfm::cli
