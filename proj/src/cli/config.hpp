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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pqs::cli {

inline constexpr int kConfigSchema = 1;

/// Contents of a `--config` file. Every field is optional; absent fields keep
/// the command-line or built-in default.
struct ConfigFile {
  std::optional<double> gamma;
  std::optional<double> eta;
  std::optional<double> dt;
  std::optional<double> T;
  std::optional<double> eta_p;
  std::optional<double> theta_prepare;
  /// Present and null means "no post-selection".
  std::optional<std::optional<double>> theta_postselect;
  std::optional<std::size_t> n_trajectories;
  std::optional<int> integration_window;
  std::optional<double> postselect_delay;
  std::optional<std::vector<double>> snapshot_times;
  std::optional<std::uint64_t> seed;
  std::optional<int> substeps;
  std::optional<unsigned> threads;
  std::optional<int> grid_n;
  std::optional<std::string> record;
};

/// Thrown for malformed configs; maps to the usage exit code.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses JSON text. Requires "schema": 1 and rejects unknown fields.
ConfigFile parse_config(const std::string& text);
ConfigFile load_config(const std::filesystem::path& path);

}  // namespace pqs::cli
