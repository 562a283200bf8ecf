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

#include <string>
#include <vector>

#include <json.hpp>

#include "sfm/ctf.hpp"
#include "sfm/heterogeneity.hpp"
#include "sfm/interaction.hpp"
#include "sfm/popn_risk.hpp"
#include "sfm/sensitivity.hpp"
#include "sfm/summary.hpp"

namespace sfm::report {

using nlohmann::json;

// Structured records. Non-finite numbers become null; influence vectors are
// never emitted.
json to_json(const CtfEstimate& e);
json to_json(const TvDecomposition& d);
json to_json(const InteractionReport& r);
json to_json(const Heatmap& h);
json to_json(const std::vector<BinEstimate>& bins);
json to_json(const MechanismProfiles& p);
json to_json(const CorrelationResult& c);
json to_json(const RiskRatio& rr);
json to_json(const RadarTable& r);
json to_json(const OverlapReport& r);
json to_json(const MissingnessReport& r);
json to_json(const CohortSummary& s);

// Left-aligned first column, right-aligned others, two-space gutters.
std::string aligned_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows);
std::string num(double v, int digits = 4);

std::string text(const TvDecomposition& d);
std::string text(const InteractionReport& r);
std::string text(const Heatmap& h, const std::string& title);
std::string text(const std::vector<BinEstimate>& bins);
std::string text(const RadarTable& r);
std::string text(const OverlapReport& r);
std::string text(const MissingnessReport& r);
std::string text(const CohortSummary& s);

// bin,type,estimate,ci_lo,ci_hi,n,masked
std::string heatmap_csv(const Heatmap& h);
// area,rr,excess_pct,category
std::string radar_csv(const RadarTable& r);

}  // namespace sfm::report
