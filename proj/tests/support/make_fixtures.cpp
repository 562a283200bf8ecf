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

// Regenerates the committed SCM fixtures: make_fixtures <tests/fixtures>

#include <cstdio>
#include <filesystem>

#include <fmt/format.h>

#include "spec_gen.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: make_fixtures <fixture-dir>\n");
    return 2;
  }
  namespace fs = std::filesystem;
  const fs::path root = argv[1];
  fs::create_directories(root / "scm");
  fs::create_directories(root / "demo");
  sfm::Rng rng(20240601);
  for (int i = 0; i < 20; ++i) {
    sfm::testing::SpecShape shape;
    // A few fixtures carry an X x W product or lack a pathway.
    if (i % 5 == 1) shape.xw = 0.8;
    if (i % 5 == 2) shape.direct = false;
    if (i % 5 == 3) shape.indirect = false;
    if (i % 5 == 4) shape.confounded = false;
    const std::string name = fmt::format("fixture_{:02d}", i);
    sfm::testing::random_spec(rng, shape, name).save((root / "scm" / (name + ".json")).string());
  }
  sfm::testing::demo_spec().save((root / "demo" / "spec.json").string());
  return 0;
}
