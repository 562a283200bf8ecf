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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sfm/dataset.hpp"

namespace sfm {

// Flat-section key/value configuration ("[section]" then "key = value").
class IniConfig {
 public:
  static IniConfig parse(const std::string& text);
  static IniConfig load(const std::string& path);

  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  // Comma-separated list; empty when absent.
  std::vector<std::string> get_list(const std::string& section, const std::string& key) const;
  void set(const std::string& section, const std::string& key, const std::string& value);
  bool has_section(const std::string& section) const { return data_.count(section) != 0; }
  const std::map<std::string, std::map<std::string, std::string>>& sections() const { return data_; }

  std::string to_string() const;

 private:
  std::map<std::string, std::map<std::string, std::string>> data_;
};

std::vector<std::string> split_list(const std::string& text, char sep = ',');

// Reads the [columns] section:
//   attribute, minority, majority, confounders, mediators, outcome,
//   age, admission_type, area, year, readmission
RoleSchema schema_from_config(const IniConfig& cfg);
// Reads delimiter / categorical / sentinel / sentinel.<column> from [columns].
LoadOptions load_options_from_config(const IniConfig& cfg);
// Writes a schema back as a [columns] section.
void schema_to_config(const RoleSchema& schema, IniConfig& cfg);

}  // namespace sfm
