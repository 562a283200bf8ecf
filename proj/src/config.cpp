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

#include "sfm/config.hpp"

#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "sfm/error.hpp"

namespace sfm {

namespace {

std::string trim_copy(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim_copy(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

IniConfig IniConfig::parse(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  IniConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      cfg.data_[""][section] = trim_copy(body.data());
      continue;
    }
    for (const auto& [key, value] : body) cfg.data_[section][key] = trim_copy(value.data());
  }
  return cfg;
}

IniConfig IniConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::optional<std::string> IniConfig::get(const std::string& section, const std::string& key) const {
  const auto s = data_.find(section);
  if (s == data_.end()) return std::nullopt;
  const auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  return k->second;
}

std::string IniConfig::get_or(const std::string& section, const std::string& key,
                              const std::string& fallback) const {
  return get(section, key).value_or(fallback);
}

std::vector<std::string> IniConfig::get_list(const std::string& section, const std::string& key) const {
  const auto v = get(section, key);
  return v ? split_list(*v) : std::vector<std::string>{};
}

void IniConfig::set(const std::string& section, const std::string& key, const std::string& value) {
  data_[section][key] = value;
}

std::string IniConfig::to_string() const {
  std::string out;
  for (const auto& [section, body] : data_) {
    if (!section.empty()) out += "[" + section + "]\n";
    for (const auto& [k, v] : body) out += k + " = " + v + "\n";
    out += "\n";
  }
  return out;
}

RoleSchema schema_from_config(const IniConfig& cfg) {
  auto required = [&](const std::string& key) {
    auto v = cfg.get("columns", key);
    if (!v || v->empty()) throw ConfigError("config [columns] is missing required key '" + key + "'");
    return *v;
  };
  auto optional = [&](const std::string& key) -> std::optional<std::string> {
    auto v = cfg.get("columns", key);
    if (!v || v->empty()) return std::nullopt;
    return v;
  };
  RoleSchema s;
  s.attribute_column = required("attribute");
  s.minority_level = required("minority");
  s.majority_level = required("majority");
  s.outcome_column = required("outcome");
  s.confounder_columns = cfg.get_list("columns", "confounders");
  s.mediator_columns = cfg.get_list("columns", "mediators");
  s.age_column = optional("age");
  s.admission_type_column = optional("admission_type");
  s.area_column = optional("area");
  s.year_column = optional("year");
  s.readmission_column = optional("readmission");
  s.validate();
  return s;
}

LoadOptions load_options_from_config(const IniConfig& cfg) {
  LoadOptions o;
  if (auto d = cfg.get("columns", "delimiter")) {
    if (*d == "tab" || *d == "\\t") o.delimiter = '\t';
    else if (d->size() == 1) o.delimiter = (*d)[0];
    else throw ConfigError("delimiter must be a single character or 'tab'");
  }
  o.categorical = cfg.get_list("columns", "categorical");
  auto to_double = [](const std::string& key, const std::string& v) {
    try {
      std::size_t pos = 0;
      const double d = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      return d;
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "' must be numeric, got '" + v + "'");
    }
  };
  if (auto s = cfg.get("columns", "sentinel")) o.default_sentinel = to_double("sentinel", *s);
  if (cfg.has_section("columns")) {
    for (const auto& [k, v] : cfg.sections().at("columns")) {
      if (k.rfind("sentinel.", 0) == 0) o.sentinels[k.substr(9)] = to_double(k, v);
    }
  }
  return o;
}

void schema_to_config(const RoleSchema& s, IniConfig& cfg) {
  auto join = [](const std::vector<std::string>& v) {
    std::string out;
    for (const auto& x : v) out += (out.empty() ? "" : ", ") + x;
    return out;
  };
  cfg.set("columns", "attribute", s.attribute_column);
  cfg.set("columns", "minority", s.minority_level);
  cfg.set("columns", "majority", s.majority_level);
  cfg.set("columns", "outcome", s.outcome_column);
  cfg.set("columns", "confounders", join(s.confounder_columns));
  cfg.set("columns", "mediators", join(s.mediator_columns));
  if (s.age_column) cfg.set("columns", "age", *s.age_column);
  if (s.admission_type_column) cfg.set("columns", "admission_type", *s.admission_type_column);
  if (s.area_column) cfg.set("columns", "area", *s.area_column);
  if (s.year_column) cfg.set("columns", "year", *s.year_column);
  if (s.readmission_column) cfg.set("columns", "readmission", *s.readmission_column);
}

}  // namespace sfm
