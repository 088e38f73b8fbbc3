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

#include <filesystem>
#include <iosfwd>
#include <string>

#include "pqs/trajectory.hpp"

namespace pqs::io {

/// Decimal with 17 significant digits; parses back to the same double.
std::string format_double(double v);

/// CSV body: header `t_us,V`, one row per sample.
void write_record_csv(std::ostream& os, const trajectory::HomodyneRecord& record);

/// Sidecar JSON {gamma_per_us, eta, dt_us, T_us, seed}; seed is null for
/// measured records.
void write_record_sidecar(std::ostream& os, const trajectory::HomodyneRecord& record);

/// Reads samples from CSV. Parameters come from the sidecar; the result is
/// validated against them.
trajectory::HomodyneRecord read_record(std::istream& csv, std::istream& sidecar);

/// Sidecar path for a record CSV: same stem, `.json` extension.
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

/// Writes `<path>` and its sidecar. Throws std::runtime_error on I/O failure.
void save_record(const std::filesystem::path& csv_path, const trajectory::HomodyneRecord& record);
trajectory::HomodyneRecord load_record(const std::filesystem::path& csv_path);

}  // namespace pqs::io
