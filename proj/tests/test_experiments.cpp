// SPDX-License-Identifier: Apache-2.0
//
// ma-dfrc: movable-antenna covert dual-functional radar-communication design
// Copyright (C) 2026 The ma-dfrc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dfrc/experiments.hpp"

using namespace dfrc;

namespace {

SystemConfig quick_config() {
  SystemConfig c = load_config(DFRC_SOURCE_DIR "/configs/default.cfg");
  c.bcd_max_iter = 3;
  return c;
}

const ExperimentResult& small_sweep() {
  static const ExperimentResult r = [] {
    const SystemConfig c = quick_config();
    ExperimentOptions o;
    o.threads = 2;
    return run_power_sweep(c, {12.0, 15.0}, seed_list(c, 2), o);
  }();
  return r;
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("seed list counts up from the configured seed") {
  SystemConfig c;
  c.rng_seed = 40;
  CHECK(seed_list(c, 3) == std::vector<std::uint64_t>{40, 41, 42});
}

TEST_CASE("sweep shape and statistics") {
  const ExperimentResult& r = small_sweep();
  CHECK(r.id == "power");
  CHECK(r.grid == std::vector<double>{12.0, 15.0});
  REQUIRE(r.curves.size() == 4);
  for (const auto& c : r.curves) {
    REQUIRE(c.raw.size() == 2);
    for (std::size_t g = 0; g < 2; ++g) {
      REQUIRE(c.raw[g].size() == 2);
      double sum = 0.0;
      int n = 0;
      for (const auto& rec : c.raw[g]) {
        if (rec.ok) sum += rec.rate_bits, ++n;
      }
      CHECK(c.count[g] == n);
      if (n > 0) CHECK(c.mean[g] == doctest::Approx(sum / n));
    }
  }
  REQUIRE(r.curve("ma") != nullptr);
  CHECK(r.curve("nope") == nullptr);
}

TEST_CASE("per-seed rates follow the constraint ordering") {
  const SystemConfig c = quick_config();
  ExperimentOptions o;
  o.threads = 1;
  const ExperimentResult snr = run_snr_tradeoff(c, {12.0, 15.0}, seed_list(c, 2), o);
  for (std::size_t k = 0; k < 4; ++k) {
    for (std::size_t s = 0; s < 2; ++s) {
      const RunRecord& lo = small_sweep().curves[k].raw[0][s];
      const RunRecord& hi = small_sweep().curves[k].raw[1][s];
      if (lo.ok && hi.ok) CHECK(hi.rate_bits >= lo.rate_bits * (1.0 - 1e-9));
      const RunRecord& loose = snr.curves[k].raw[0][s];
      const RunRecord& tight = snr.curves[k].raw[1][s];
      if (loose.ok && tight.ok) CHECK(loose.rate_bits >= tight.rate_bits * (1.0 - 1e-9));
    }
  }
}

TEST_CASE("thread count does not change results") {
  const SystemConfig c = quick_config();
  ExperimentOptions one;
  one.threads = 1;
  const ExperimentResult a = run_power_sweep(c, {12.0, 15.0}, seed_list(c, 2), one);
  std::ostringstream x, y;
  write_csv(x, a);
  write_csv(y, small_sweep());
  CHECK(x.str() == y.str());
}

TEST_CASE("csv layout") {
  std::ostringstream out;
  write_csv(out, small_sweep());
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "experiment,parameter,value,scheme,seed,rate_bits,iterations,status");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 4 * 2 * 2);
}

TEST_CASE("json round trip") {
  std::ostringstream out;
  write_json(out, small_sweep());
  const auto doc = nlohmann::json::parse(out.str());
  CHECK(doc.at("id") == "power");
  std::istringstream in(out.str());
  const ExperimentResult back = read_json(in);
  CHECK(back.grid == small_sweep().grid);
  CHECK(back.seeds == small_sweep().seeds);
  REQUIRE(back.curves.size() == small_sweep().curves.size());
  std::ostringstream a, b;
  write_csv(a, back);
  write_csv(b, small_sweep());
  CHECK(a.str() == b.str());
}

TEST_CASE("svg is a complete document") {
  std::ostringstream out;
  write_svg(out, small_sweep());
  const std::string s = out.str();
  CHECK(s.find("<svg") != std::string::npos);
  CHECK(s.rfind("</svg>") != std::string::npos);
  CHECK(s.find("ma") != std::string::npos);
}

TEST_CASE("emit writes the requested files") {
  const auto dir = std::filesystem::temp_directory_path() / "dfrc_emit_test";
  std::filesystem::remove_all(dir);
  const auto files = emit(small_sweep(), {"csv", "json", "svg"}, dir.string());
  CHECK(files.size() == 3);
  for (const auto& f : files) CHECK(std::filesystem::file_size(f) > 0);
  CHECK_THROWS_AS(emit(small_sweep(), {"xml"}, dir.string()), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("convergence experiment records monotone traces") {
  const SystemConfig c = quick_config();
  const ExperimentResult r = run_convergence(c, seed_list(c, 1), {4});
  REQUIRE(r.traces.size() == 1);
  CHECK(r.traces[0].num_antennas == 4);
  for (std::size_t k = 1; k < r.traces[0].entries.size(); ++k) {
    CHECK(r.traces[0].entries[k].f1 >= r.traces[0].entries[k - 1].f1 - 1e-6);
  }
  std::ostringstream out;
  write_trace_csv(out, r);
  CHECK(out.str().find("iteration") != std::string::npos);
}

TEST_CASE("unknown experiment name") {
  CHECK_THROWS_AS(run_experiment("fig9", quick_config(), {1}), Error);
}

}
