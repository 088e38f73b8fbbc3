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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "pqs/record_io.hpp"
#include "pqs/trajectory.hpp"

using namespace pqs;

TEST_SUITE("record_io") {
  TEST_CASE("17-digit formatting round-trips") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 123456.789, 5e-324}) {
      CHECK(std::strtod(io::format_double(v).c_str(), nullptr) == v);
    }
  }

  TEST_CASE("write, read, write is byte-identical") {
    SimParams p;
    const auto gen = trajectory::generate_record(from_theta(kPi), p, 99);
    std::ostringstream csv1, meta1;
    io::write_record_csv(csv1, gen.record);
    io::write_record_sidecar(meta1, gen.record);
    CHECK(csv1.str().rfind("t_us,V\n", 0) == 0);

    std::istringstream csv_in(csv1.str()), meta_in(meta1.str());
    const auto back = io::read_record(csv_in, meta_in);
    REQUIRE(back.samples.size() == gen.record.samples.size());
    for (std::size_t k = 0; k < back.samples.size(); ++k) {
      CHECK(back.samples[k].V == gen.record.samples[k].V);
      CHECK(back.samples[k].t == gen.record.samples[k].t);
    }
    CHECK(back.seed == 99u);
    CHECK(back.params.gamma == p.gamma);

    std::ostringstream csv2, meta2;
    io::write_record_csv(csv2, back);
    io::write_record_sidecar(meta2, back);
    CHECK(csv1.str() == csv2.str());
    CHECK(meta1.str() == meta2.str());
  }

  TEST_CASE("files on disk") {
    const auto dir = std::filesystem::temp_directory_path() / "pqs_record_io_test";
    std::filesystem::create_directories(dir);
    SimParams p;
    auto gen = trajectory::generate_record(from_theta(1.0), p, 3);
    gen.record.seed.reset();
    io::save_record(dir / "r.csv", gen.record);
    CHECK(std::filesystem::exists(dir / "r.json"));
    const auto back = io::load_record(dir / "r.csv");
    CHECK_FALSE(back.seed.has_value());
    CHECK(back.samples.back().V == gen.record.samples.back().V);
    CHECK_THROWS_AS(io::load_record(dir / "missing.csv"), std::runtime_error);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("malformed input") {
    std::istringstream meta(R"({"gamma_per_us":1.628,"eta":0.3,"dt_us":0.02,"T_us":0.04,"seed":null})");
    std::istringstream bad_header("t,V\n0,1\n");
    CHECK_THROWS_AS(io::read_record(bad_header, meta), std::runtime_error);
    std::istringstream meta2(meta.str());
    std::istringstream short_csv("t_us,V\n0,0.1\n");
    CHECK_THROWS_AS(io::read_record(short_csv, meta2), InvalidParams);
    std::istringstream meta3(meta.str());
    std::istringstream junk("t_us,V\n0,abc\n0.02,1\n");
    CHECK_THROWS_AS(io::read_record(junk, meta3), std::runtime_error);
    std::istringstream meta4(R"({"eta":0.3})");
    std::istringstream ok("t_us,V\n");
    CHECK_THROWS_AS(io::read_record(ok, meta4), std::runtime_error);
  }
}
