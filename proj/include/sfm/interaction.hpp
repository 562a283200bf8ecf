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

#include "sfm/ctf.hpp"

namespace sfm {

// One z-test on a contrast of counterfactual means.
struct InteractionRow {
  std::string name;
  double statistic = 0.0;
  double se = 0.0;
  double z = 0.0;
  double p_value = 1.0;
  bool reject = false;
  bool degenerate = false;  // influence variance was zero; p set to 1
};

struct InteractionReport {
  double alpha = 0.05;
  std::vector<InteractionRow> rows;  // TE*SE, DE*IE, DE*SE, IE*SE, DE*IE*SE
  const InteractionRow& row(const std::string& name) const;
};

// Statistics, each zero when outcome and mediator mechanisms are additive in x:
//   TE*SE     total effect among x0 minus total effect among x1,
//             [psi(1,1,0) - psi(0,0,0)] - [psi(1,1,1) - psi(0,0,1)]
//   DE*IE     forward minus reverse direct effect,
//             [psi(0,1,0) - psi(0,0,0)] - [psi(1,1,0) - psi(1,0,0)]
//   DE*SE     direct effect among x0 minus among x1,
//             [psi(0,1,0) - psi(0,0,0)] - [psi(0,1,1) - psi(0,0,1)]
//   IE*SE     indirect effect among x0 minus among x1,
//             [psi(1,1,0) - psi(0,1,0)] - [psi(1,1,1) - psi(0,1,1)]
//   DE*IE*SE  direct-effect asymmetry among x0 minus among x1, where
//             asym(c) = psi(0,1,c) - psi(0,0,c) - psi(1,1,c) + psi(1,0,c)
InteractionReport test_interactions(const ArmTable& arms, double alpha = 0.05);
InteractionReport test_interactions(const SfmDataset& ds, const NuisanceFits& fits, double alpha = 0.05);

}  // namespace sfm
