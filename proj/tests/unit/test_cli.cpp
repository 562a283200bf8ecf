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

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "sfm/cli.hpp"
#include "sfm/dataset.hpp"

using namespace sfm;
namespace fs = std::filesystem;

namespace {

const std::string kFixtures = SFM_FIXTURES;

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "sfm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sfm_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) { return read_text_file(p.string()); }

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

// Simulated demo data with its column config; shared by the tests below.
const fs::path& demo_dir() {
  static const fs::path dir = [] {
    const fs::path d = scratch("demo");
    const Run r = run({"simulate", "--spec", kFixtures + "/demo/spec.json", "--rows", "3000", "--seed", "7", "--out",
                       d.string()});
    REQUIRE(r.code == 0);
    return d;
  }();
  return dir;
}

std::vector<std::string> demo_args(const std::string& command, const fs::path& out) {
  return {command, "--data", (demo_dir() / "data.csv").string(), "--config", (demo_dir() / "columns.ini").string(),
          "--out", out.string(), "--trees", "30", "--bootstrap", "20"};
}

}  // namespace

TEST_CASE("simulate writes data, oracle and column config") {
  const fs::path d = demo_dir();
  CHECK(fs::exists(d / "data.csv"));
  CHECK(fs::exists(d / "manifest.json"));
  const auto oracle = nlohmann::json::parse(slurp(d / "oracle.json"));
  CHECK(oracle["psi"].size() == 8);
  CHECK(oracle["de_cells"].size() == 12);
  CHECK(line_count(slurp(d / "data.csv")) == 3001);
}

TEST_CASE("simulate with zero rows") {
  const fs::path d = scratch("empty");
  const Run r = run({"simulate", "--spec", kFixtures + "/demo/spec.json", "--rows", "0", "--out", d.string()});
  REQUIRE(r.code == 0);
  CHECK(line_count(slurp(d / "data.csv")) == 1);
  CHECK(nlohmann::json::parse(slurp(d / "oracle.json"))["psi"].size() == 8);
}

TEST_CASE("decompose output and replay") {
  const fs::path d = scratch("decompose");
  const Run r = run(demo_args("decompose", d));
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto j = nlohmann::json::parse(slurp(d / "decomposition.json"));
  CHECK(std::abs(j["forward"]["telescoping_residual"].get<double>()) <= 1e-12);
  CHECK(j["reverse"]["orientation"] == "reverse");
  CHECK(j["psi"].size() == 8);
  const auto manifest = nlohmann::json::parse(slurp(d / "manifest.json"));
  CHECK(manifest["command"] == "decompose");
  CHECK_FALSE(manifest["settings"].contains("out"));

  const fs::path d2 = scratch("decompose_replay");
  const Run again = run({"replay", (d / "manifest.json").string(), "--out", d2.string()});
  REQUIRE_MESSAGE(again.code == 0, again.err);
  for (const char* f : {"decomposition.json", "decomposition.txt", "manifest.json"}) CHECK(slurp(d / f) == slurp(d2 / f));
}

TEST_CASE("heterogeneity writes a 12-cell heatmap") {
  const fs::path d = scratch("het");
  const Run r = run(demo_args("heterogeneity", d));
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const std::string csv = slurp(d / "de_heatmap.csv");
  CHECK(line_count(csv) == 13);
  CHECK(csv.rfind("bin,type,estimate,ci_lo,ci_hi,n,masked\n", 0) == 0);
  const auto j = nlohmann::json::parse(slurp(d / "heterogeneity.json"));
  CHECK(j["indirect_by_age"].size() == 4);
}

TEST_CASE("interactions, summary and sensitivity commands run") {
  for (const char* cmd : {"interactions", "summary", "sensitivity-overlap", "sensitivity-missing"}) {
    const fs::path d = scratch(cmd);
    std::vector<std::string> args = demo_args(cmd, d);
    args.insert(args.end(), {"--draws", "2", "--quantiles", "0,0.02"});
    const Run r = run(args);
    CHECK_MESSAGE(r.code == 0, cmd, r.err);
  }
}

TEST_CASE("radar and risk ratios from count files") {
  const fs::path d = scratch("radar");
  const Run r = run({"radar", "--census", kFixtures + "/popn/census.csv", "--admissions",
                     kFixtures + "/popn/admissions.csv", "--out", d.string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const std::string csv = slurp(d / "radar.csv");
  REQUIRE(line_count(csv) == 4);
  CHECK(csv.rfind("area,rr,excess_pct,category\nA,3.75,275,extreme\nB,", 0) == 0);
  CHECK(csv.find(",moderate\nC,") != std::string::npos);
  CHECK(csv.substr(csv.size() - 5) == "none\n");

  const fs::path d2 = scratch("rr");
  const Run rr = run({"riskratio", "--census", kFixtures + "/popn/census.csv", "--admissions",
                      kFixtures + "/popn/admissions.csv", "--bins", "18-49,50-64", "--bootstrap", "50", "--out",
                      d2.string()});
  REQUIRE_MESSAGE(rr.code == 0, rr.err);
  CHECK(line_count(slurp(d2 / "rr_heatmap.csv")) == 7);
}

TEST_CASE("exit codes") {
  CHECK(run({"decompose", "--bogus"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"--help"}).code == 0);
  const fs::path d = scratch("codes");
  CHECK(run({"decompose", "--out", d.string()}).code == 2);
  CHECK(run({"decompose", "--data", "/nonexistent.csv", "--config", (demo_dir() / "columns.ini").string(), "--out",
             d.string()})
            .code == 6);
  auto args = demo_args("decompose", d);
  args.insert(args.end(), {"--folds", "x"});
  CHECK(run(args).code == 2);
  args = demo_args("decompose", d);
  args.insert(args.end(), {"--learner", "forest"});
  CHECK(run(args).code == 2);
  CHECK(run({"replay", "/nonexistent/manifest.json", "--out", d.string()}).code == 6);
}

TEST_CASE("settings precedence: flag over environment over config over default") {
  const fs::path cfg = scratch("cfg.ini");
  std::string text = slurp(demo_dir() / "columns.ini") + "\n[run]\nseed = 11\nfolds = 3\n";
  write_text_file(cfg.string(), text);
  const fs::path d = scratch("prec");
  ::setenv("SFM_FOLDS", "4", 1);
  const Run r = run({"decompose", "--data", (demo_dir() / "data.csv").string(), "--config", cfg.string(), "--out",
                     d.string(), "--trees", "10", "--seed", "12"});
  ::unsetenv("SFM_FOLDS");
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto m = nlohmann::json::parse(slurp(d / "manifest.json"));
  CHECK(m["settings"]["seed"] == "12");
  CHECK(m["settings"]["folds"] == "4");
  CHECK(m["settings"]["learning_rate"] == "0.1");
  const auto j = nlohmann::json::parse(slurp(d / "decomposition.json"));
  CHECK(j["forward"]["meta"]["folds"] == 4);
}
