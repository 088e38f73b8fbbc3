// Copyright 2026 The pqs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace pqs::cli {

namespace {

using nlohmann::json;

template <typename T>
void read_field(const json& j, const char* key, std::optional<T>& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  }
}

}  // namespace

ConfigFile parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  static const std::set<std::string> known{
      "schema",         "gamma",         "eta",   "dt",       "T",       "eta_p",
      "theta_prepare",  "theta_postselect", "n_trajectories", "integration_window",
      "postselect_delay", "snapshot_times", "seed", "substeps", "threads", "grid_n", "record"};
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) throw ConfigError("unknown config field '" + item.key() + "'");
  }
  if (!j.contains("schema")) throw ConfigError("config is missing \"schema\"");
  if (!j.at("schema").is_number_integer() || j.at("schema").get<int>() != kConfigSchema) {
    throw ConfigError("unsupported config schema (expected " + std::to_string(kConfigSchema) + ")");
  }

  ConfigFile c;
  read_field(j, "gamma", c.gamma);
  read_field(j, "eta", c.eta);
  read_field(j, "dt", c.dt);
  read_field(j, "T", c.T);
  read_field(j, "eta_p", c.eta_p);
  read_field(j, "theta_prepare", c.theta_prepare);
  if (j.contains("theta_postselect")) {
    const json& v = j.at("theta_postselect");
    if (v.is_null()) {
      c.theta_postselect = std::optional<double>{};
    } else if (v.is_number()) {
      c.theta_postselect = std::optional<double>{v.get<double>()};
    } else {
      throw ConfigError("config field 'theta_postselect' must be a number or null");
    }
  }
  read_field(j, "n_trajectories", c.n_trajectories);
  read_field(j, "integration_window", c.integration_window);
  read_field(j, "postselect_delay", c.postselect_delay);
  read_field(j, "snapshot_times", c.snapshot_times);
  read_field(j, "seed", c.seed);
  read_field(j, "substeps", c.substeps);
  read_field(j, "threads", c.threads);
  read_field(j, "grid_n", c.grid_n);
  read_field(j, "record", c.record);
  return c;
}

ConfigFile load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace pqs::cli
