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

#include "pqs/record_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace pqs::io {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_record_csv(std::ostream& os, const trajectory::HomodyneRecord& record) {
  os << "t_us,V\n";
  for (const auto& s : record.samples) {
    os << format_double(s.t) << ',' << format_double(s.V) << '\n';
  }
}

void write_record_sidecar(std::ostream& os, const trajectory::HomodyneRecord& record) {
  json j;
  j["gamma_per_us"] = record.params.gamma;
  j["eta"] = record.params.eta;
  j["dt_us"] = record.params.dt;
  j["T_us"] = record.params.T;
  j["seed"] = record.seed ? json(*record.seed) : json(nullptr);
  os << j.dump(2) << '\n';
}

namespace {

double parse_double(const std::string& field, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (field.empty() || end != field.c_str() + field.size()) {
    throw std::runtime_error("record CSV line " + std::to_string(line) + ": bad number '" +
                             field + "'");
  }
  return v;
}

}  // namespace

trajectory::HomodyneRecord read_record(std::istream& csv, std::istream& sidecar) {
  trajectory::HomodyneRecord record;

  json meta;
  try {
    meta = json::parse(sidecar);
    record.params.gamma = meta.at("gamma_per_us").get<double>();
    record.params.eta = meta.at("eta").get<double>();
    record.params.dt = meta.at("dt_us").get<double>();
    record.params.T = meta.at("T_us").get<double>();
    if (meta.contains("seed") && !meta.at("seed").is_null()) {
      record.seed = meta.at("seed").get<std::uint64_t>();
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("record sidecar: ") + e.what());
  }

  std::string line;
  if (!std::getline(csv, line) || line != "t_us,V") {
    throw std::runtime_error("record CSV: expected header 't_us,V'");
  }
  std::size_t lineno = 1;
  while (std::getline(csv, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::runtime_error("record CSV line " + std::to_string(lineno) + ": missing comma");
    }
    record.samples.push_back({parse_double(line.substr(comma + 1), lineno),
                              parse_double(line.substr(0, comma), lineno)});
  }
  record.validate();
  return record;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  std::filesystem::path p = csv_path;
  p.replace_extension(".json");
  return p;
}

void save_record(const std::filesystem::path& csv_path, const trajectory::HomodyneRecord& record) {
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot open " + csv_path.string() + " for writing");
  write_record_csv(csv, record);
  const auto meta_path = sidecar_path(csv_path);
  std::ofstream meta(meta_path);
  if (!meta) throw std::runtime_error("cannot open " + meta_path.string() + " for writing");
  write_record_sidecar(meta, record);
  if (!csv || !meta) throw std::runtime_error("write failed for " + csv_path.string());
}

trajectory::HomodyneRecord load_record(const std::filesystem::path& csv_path) {
  std::ifstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot open " + csv_path.string());
  const auto meta_path = sidecar_path(csv_path);
  std::ifstream meta(meta_path);
  if (!meta) throw std::runtime_error("cannot open " + meta_path.string());
  return read_record(csv, meta);
}

}  // namespace pqs::io
