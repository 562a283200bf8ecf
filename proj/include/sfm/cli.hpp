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

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "sfm/config.hpp"

namespace sfm::cli {

// Every run setting as text, keyed by its config name. Flags use the same
// name with dashes (--learning-rate), environment variables the upper-case
// name with an SFM_ prefix (SFM_LEARNING_RATE). Precedence: flag, then
// environment, then the [run] section of --config, then the default.
using Settings = std::map<std::string, std::string>;

const Settings& default_settings();

struct Invocation {
  std::string command;
  Settings settings;
  IniConfig columns;  // [columns] section naming the data roles
};

// Runs one subcommand and writes its outputs plus manifest.json under the
// `out` setting. Returns the process exit code.
int execute(const Invocation& inv, std::ostream& log);

// Full command line entry point; errors are reported on `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sfm::cli
