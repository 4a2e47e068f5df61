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

#include <cmath>
#include <sstream>

#include "dfrc/config.hpp"
#include "dfrc/covertness.hpp"

using namespace dfrc;

namespace {

SystemConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("default file matches the documented scenario") {
  const SystemConfig c = load_config(DFRC_SOURCE_DIR "/configs/default.cfg");
  CHECK(c.num_antennas == 4);
  CHECK(c.num_users == 3);
  CHECK(c.num_paths == 6);
  CHECK(c.min_spacing == doctest::Approx(0.05));
  CHECK(c.region_length == doctest::Approx(1.0));
  CHECK(c.target_angle == doctest::Approx(35.0 * kPi / 180.0));
  CHECK(c.total_power == doctest::Approx(std::pow(10.0, 1.5)));
  CHECK(c.radar_snr_threshold == doctest::Approx(std::pow(10.0, 1.5)));
  CHECK(c.covertness_level == 0.1);
  CHECK(c.detection_samples == 100);
  // beta defaults to the path-loss law at the warden distance
  CHECK(c.willie_gain == doctest::Approx(1e-3 * std::pow(60.0, -3.2)).epsilon(1e-12));
}

TEST_CASE("write and parse round trip is bit exact") {
  SystemConfig c = load_config(DFRC_SOURCE_DIR "/configs/default.cfg");
  c.total_power = 0.1 + 0.2;
  c.willie_gain = 1.2345678901234567e-9;
  c.rng_seed = 987654321;
  c.kappa_mode = KappaMode::Unscaled;
  c.scheme = Scheme::GreedySelection;
  std::ostringstream out;
  write_config(out, c);
  const SystemConfig d = parse(out.str());
  std::ostringstream again;
  write_config(again, d);
  CHECK(out.str() == again.str());
  CHECK(d.total_power == c.total_power);
  CHECK(d.willie_gain == c.willie_gain);
  CHECK(d.rng_seed == c.rng_seed);
  CHECK(d.kappa_mode == KappaMode::Unscaled);
  CHECK(d.scheme == Scheme::GreedySelection);
}

TEST_CASE("unit conversions") {
  const SystemConfig c = parse("power_dbw = 20\ngamma_db = 10\nmin_spacing_wavelengths = 1\ntarget_angle_deg = 90\n");
  CHECK(c.total_power == doctest::Approx(100.0));
  CHECK(c.radar_snr_threshold == doctest::Approx(10.0));
  CHECK(c.min_spacing == doctest::Approx(c.wavelength));
  CHECK(c.target_angle == doctest::Approx(kPi / 2));
}

TEST_CASE("errors name the key") {
  CHECK(error_of("bogus = 1\n").find("bogus") == 0);
  CHECK(error_of("num_antennas = x\n").find("num_antennas") != std::string::npos);
  CHECK(error_of("power_w = 1\npower_dbw = 0\n").find("power_w") == 0);
  CHECK(error_of("epsilon = 2\n").find("epsilon") == 0);
  CHECK(error_of("num_antennas = 4\nnum_antennas = 5\n").find("duplicate") != std::string::npos);
  CHECK(error_of("just text\n").find("test:1") == 0);
  CHECK(error_of("kappa_mode = fancy\n").find("kappa_mode") == 0);
  CHECK(error_of("scheme = other\n").find("scheme") == 0);
}

TEST_CASE("region shorter than the minimum span is infeasible") {
  CHECK_THROWS_AS(parse("num_antennas = 30\n"), InfeasibleError);
}

TEST_CASE("kappa follows the configured mode") {
  SystemConfig c;
  c.covertness_level = 0.3;
  c.detection_samples = 10;
  const double per_sample = covertness_ratio_bound(c);
  c.kappa_mode = KappaMode::Unscaled;
  const double unscaled = covertness_ratio_bound(c);
  CHECK(unscaled > per_sample);
  CHECK(std::log(per_sample) + 1.0 / per_sample - 1.0 == doctest::Approx(2.0 * 0.09 / 10).epsilon(1e-12));
  CHECK(std::log(unscaled) + 1.0 / unscaled - 1.0 == doctest::Approx(2.0 * 0.09).epsilon(1e-12));
}

}
