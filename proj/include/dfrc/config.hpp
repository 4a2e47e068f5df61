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

#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>

#include "dfrc/types.hpp"

namespace dfrc {

enum class Scheme { MovableAntenna, FixedPosition, GreedySelection, UpperBound };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

/// How the covertness ratio bound is derived from (epsilon, M).
enum class KappaMode {
  PerSample,  ///< ln x + 1/x - 1 = 2 eps^2 / M, exact recast of the KL constraint.
  Unscaled,   ///< ln x + 1/x - 1 = 2 eps^2, ignores the sample count.
};

/// Every physical and algorithmic parameter of one DFRC design problem.
///
/// All values are SI / linear. The config file accepts dB, degrees and
/// wavelength-relative units and converts them on load.
struct SystemConfig {
  // Array and channel geometry.
  int num_antennas = 4;
  int num_users = 3;
  int num_paths = 6;
  double wavelength = 0.1;      // m
  double min_spacing = 0.05;    // m
  double region_length = 1.0;   // m
  double target_angle = 35.0 * kPi / 180.0;  // rad

  // Budgets.
  double total_power = 31.622776601683793;         // W (15 dBW)
  double radar_snr_threshold = 31.622776601683793; // linear (15 dB)
  double covertness_level = 0.1;
  int detection_samples = 100;
  KappaMode kappa_mode = KappaMode::PerSample;

  // Link gains and noise.
  double reflection_gain = 1e-7;  // |alpha|^2
  double willie_distance = 60.0;  // m, along the target angle
  double willie_gain = 1e-3 * std::pow(60.0, -3.2);  // |beta|^2, C0 * d_w^-a unless overridden
  double noise_user = 1e-9;       // W
  double noise_radar = 1e-9;      // W
  double noise_willie = 1e-9;     // W
  double path_loss_ref = 1e-3;    // C0 at 1 m (-30 dB)
  double path_loss_exponent = 3.2;

  // User placement: uniform in a disc.
  double user_center_x = 40.0;
  double user_center_y = 0.0;
  double user_radius = 5.0;

  std::uint64_t rng_seed = 1;
  Scheme scheme = Scheme::MovableAntenna;

  // Solver controls.
  double conic_tol = 1e-8;
  int conic_max_iter = 200;
  int bcd_max_iter = 50;
  double bcd_rel_tol = 1e-4;
  int pgd_max_iter = 100;
  double pgd_step_tol = 1e-7;  // m
  double line_search_initial = 1.0;
  double line_search_shrink = 0.5;
  double line_search_ascent = 1e-4;
  int line_search_max_halvings = 30;

  /// Throws ConfigError naming the first offending key.
  void validate() const;
};

/// Parses the flat `key = value` format. Unknown keys and malformed values
/// are reported with the key name and line number.
SystemConfig parse_config(std::istream& in, const std::string& source = "<stream>");
SystemConfig load_config(const std::string& path);

/// Writes every field in canonical SI units, bit-exact on reload.
void write_config(std::ostream& out, const SystemConfig& config);
void emit_config(const SystemConfig& config, const std::string& path);

}  // namespace dfrc
