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

// Random discrete SCM specifications for tests.

#include <cstdint>

#include "sfm/rng.hpp"
#include "sfm/scm.hpp"

namespace sfm::testing {

struct SpecShape {
  bool direct = true;      // X -> Y
  bool indirect = true;    // X -> W
  bool confounded = true;  // X <-> Z
  bool additive = false;   // identity links, no x interactions
  double xw = 0.0;         // X x W product strength on the logit outcome
};

ScmSpec random_spec(Rng& rng, const SpecShape& shape, const std::string& name);

// Age (confounder) and admission type (mediator) with the default grid
// labels, plus one binary confounder and one binary mediator.
ScmSpec demo_spec();

// Binary mediator strongly driven by X and an outcome whose X effect exists
// only through an X x W product: the direct effect depends on the mediator arm.
ScmSpec product_spec();

// Overlap deliberately broken: P(X = x0 | Z) near zero for one Z stratum.
ScmSpec near_positivity_spec();

}  // namespace sfm::testing
