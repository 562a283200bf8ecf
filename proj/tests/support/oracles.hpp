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

// Reference computations written independently of the library internals.

#include <cstdint>
#include <vector>

#include "sfm/crossfit.hpp"
#include "sfm/scm.hpp"

namespace sfm::testing {

// Mediator codes of each sampled unit, recomputed from its uniforms.
std::vector<int> mediator_codes(const ScmSpec& spec, const ScmSample& sample);

// Nuisances equal to the true SCM mechanisms, no clipping.
NuisanceFits true_fits(const ScmSpec& spec, const ScmSample& sample);

// 1{X=b} rho_a/rho_b pi_c/pi_a (Y - mu_b) + 1{X=a} pi_c/pi_a (mu_b - eta_ab)
// + 1{X=c} eta_ab, all divided by the share of rows with X = c.
double naive_psi(const std::vector<std::int8_t>& x, const std::vector<double>& y, const NuisanceFits& f, int a,
                 int b, int c);

double naive_pearson(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace sfm::testing
