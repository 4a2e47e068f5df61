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

#include "dfrc/config.hpp"

#include <charconv>
#include <limits>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

namespace dfrc {

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::MovableAntenna: return "ma";
    case Scheme::FixedPosition: return "fpa";
    case Scheme::GreedySelection: return "gas";
    case Scheme::UpperBound: return "upper";
  }
  return "ma";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "ma") return Scheme::MovableAntenna;
  if (name == "fpa") return Scheme::FixedPosition;
  if (name == "gas") return Scheme::GreedySelection;
  if (name == "upper") return Scheme::UpperBound;
  throw ConfigError("scheme: unknown scheme '" + name + "' (expected ma, fpa, gas or upper)");
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ConfigError(key + ": expected a finite number, got '" + text + "'");
  }
  return value;
}

long long parse_integer(const std::string& key, const std::string& text) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  }
  return value;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void SystemConfig::validate() const {
  auto require = [](bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
  };
  require(num_antennas >= 1, "num_antennas: must be >= 1");
  require(num_users >= 1, "num_users: must be >= 1");
  require(num_paths >= 1, "num_paths: must be >= 1");
  require(detection_samples >= 1, "detection_samples: must be >= 1");
  require(wavelength > 0.0, "wavelength_m: must be positive");
  require(min_spacing > 0.0, "min_spacing_m: must be positive");
  require(region_length > 0.0, "region_length_m: must be positive");
  require(covertness_level >= 0.0 && covertness_level <= 1.0, "epsilon: must lie in [0, 1]");
  require(total_power > 0.0, "power_w: must be positive");
  require(radar_snr_threshold >= 0.0, "gamma_linear: must be nonnegative");
  require(reflection_gain > 0.0, "alpha_gain_linear: must be positive");
  require(willie_gain > 0.0, "beta_gain_linear: must be positive");
  require(willie_distance > 0.0, "willie_distance_m: must be positive");
  require(noise_user > 0.0, "noise_user_w: must be positive");
  require(noise_radar > 0.0, "noise_radar_w: must be positive");
  require(noise_willie > 0.0, "noise_willie_w: must be positive");
  require(path_loss_ref > 0.0, "path_loss_ref_linear: must be positive");
  require(path_loss_exponent > 0.0, "path_loss_exponent: must be positive");
  require(user_radius >= 0.0, "user_radius_m: must be nonnegative");
  require(target_angle >= 0.0 && target_angle <= kPi, "target_angle_rad: must lie in [0, pi]");
  require(conic_tol > 0.0, "conic_tol: must be positive");
  require(conic_max_iter >= 1, "conic_max_iter: must be >= 1");
  require(bcd_max_iter >= 1, "bcd_max_iter: must be >= 1");
  require(bcd_rel_tol > 0.0, "bcd_rel_tol: must be positive");
  require(pgd_max_iter >= 0, "pgd_max_iter: must be >= 0");
  require(pgd_step_tol > 0.0, "pgd_step_tol_m: must be positive");
  require(line_search_initial > 0.0, "line_search_initial: must be positive");
  require(line_search_shrink > 0.0 && line_search_shrink < 1.0, "line_search_shrink: must lie in (0, 1)");
  require(line_search_ascent >= 0.0, "line_search_ascent: must be nonnegative");
  require(line_search_max_halvings >= 0, "line_search_max_halvings: must be >= 0");
  // Users must not sit on the BS.
  const double nearest = std::hypot(user_center_x, user_center_y) - user_radius;
  require(nearest > 0.0, "user_radius_m: user disc must exclude the base station at the origin");
  const double span = (num_antennas - 1) * min_spacing;
  if (region_length < span) {
    std::ostringstream os;
    os << "region_length_m: infeasible placement, D = " << region_length
       << " m is shorter than (N-1)*d = " << span << " m";
    throw InfeasibleError(os.str());
  }
}

SystemConfig parse_config(std::istream& in, const std::string& source) {
  std::map<std::string, std::string> values;
  std::map<std::string, int> lines;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": expected 'key = value', got '" + line + "'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(line_no) + ": empty key");
    if (value.empty()) throw ConfigError(key + ": missing value (" + source + ":" + std::to_string(line_no) + ")");
    if (values.count(key)) throw ConfigError(key + ": duplicate key (" + source + ":" + std::to_string(line_no) + ")");
    values[key] = value;
    lines[key] = line_no;
  }

  SystemConfig cfg;
  std::map<std::string, bool> used;
  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = values.find(key);
    if (it == values.end()) return std::nullopt;
    used[key] = true;
    return it->second;
  };
  auto take_int = [&](const std::string& key, int& field) {
    if (auto v = take(key)) {
      const long long n = parse_integer(key, *v);
      if (n < std::numeric_limits<int>::min() || n > std::numeric_limits<int>::max()) {
        throw ConfigError(key + ": value out of range");
      }
      field = static_cast<int>(n);
    }
  };
  auto take_double = [&](const std::string& key, double& field) {
    if (auto v = take(key)) field = parse_double(key, *v);
  };
  // Returns true when either spelling was present.
  auto take_dual = [&](const std::string& canonical, const std::string& alternate,
                       const std::function<double(double)>& convert, double& field) {
    auto a = take(canonical);
    auto b = take(alternate);
    if (a && b) throw ConfigError(canonical + ": given twice (also as " + alternate + ")");
    if (a) field = parse_double(canonical, *a);
    if (b) field = convert(parse_double(alternate, *b));
    return a.has_value() || b.has_value();
  };

  take_int("num_antennas", cfg.num_antennas);
  take_int("num_users", cfg.num_users);
  take_int("num_paths", cfg.num_paths);
  take_int("detection_samples", cfg.detection_samples);
  take_double("wavelength_m", cfg.wavelength);
  const double lambda = cfg.wavelength;
  auto in_wavelengths = [lambda](double x) { return x * lambda; };
  take_dual("min_spacing_m", "min_spacing_wavelengths", in_wavelengths, cfg.min_spacing);
  take_dual("region_length_m", "region_length_wavelengths", in_wavelengths, cfg.region_length);
  take_dual("target_angle_rad", "target_angle_deg", deg_to_rad, cfg.target_angle);
  take_dual("power_w", "power_dbw", db_to_linear, cfg.total_power);
  take_dual("gamma_linear", "gamma_db", db_to_linear, cfg.radar_snr_threshold);
  take_double("epsilon", cfg.covertness_level);
  if (auto v = take("kappa_mode")) {
    if (*v == "per_sample") cfg.kappa_mode = KappaMode::PerSample;
    else if (*v == "unscaled") cfg.kappa_mode = KappaMode::Unscaled;
    else throw ConfigError("kappa_mode: expected per_sample or unscaled, got '" + *v + "'");
  }
  take_dual("alpha_gain_linear", "alpha_gain_db", db_to_linear, cfg.reflection_gain);
  take_dual("noise_user_w", "noise_user_dbw", db_to_linear, cfg.noise_user);
  take_dual("noise_radar_w", "noise_radar_dbw", db_to_linear, cfg.noise_radar);
  take_dual("noise_willie_w", "noise_willie_dbw", db_to_linear, cfg.noise_willie);
  take_dual("path_loss_ref_linear", "path_loss_ref_db", db_to_linear, cfg.path_loss_ref);
  take_double("path_loss_exponent", cfg.path_loss_exponent);
  take_double("willie_distance_m", cfg.willie_distance);
  const bool beta_given = take_dual("beta_gain_linear", "beta_gain_db", db_to_linear, cfg.willie_gain);
  if (!beta_given) {
    cfg.willie_gain = cfg.path_loss_ref * std::pow(cfg.willie_distance, -cfg.path_loss_exponent);
  }
  take_double("user_center_x_m", cfg.user_center_x);
  take_double("user_center_y_m", cfg.user_center_y);
  take_double("user_radius_m", cfg.user_radius);
  if (auto v = take("seed")) {
    const long long s = parse_integer("seed", *v);
    if (s < 0) throw ConfigError("seed: must be nonnegative");
    cfg.rng_seed = static_cast<std::uint64_t>(s);
  }
  if (auto v = take("scheme")) cfg.scheme = scheme_from_string(*v);
  take_double("conic_tol", cfg.conic_tol);
  take_int("conic_max_iter", cfg.conic_max_iter);
  take_int("bcd_max_iter", cfg.bcd_max_iter);
  take_double("bcd_rel_tol", cfg.bcd_rel_tol);
  take_int("pgd_max_iter", cfg.pgd_max_iter);
  take_double("pgd_step_tol_m", cfg.pgd_step_tol);
  take_double("line_search_initial", cfg.line_search_initial);
  take_double("line_search_shrink", cfg.line_search_shrink);
  take_double("line_search_ascent", cfg.line_search_ascent);
  take_int("line_search_max_halvings", cfg.line_search_max_halvings);

  for (const auto& [key, value] : values) {
    if (!used.count(key)) {
      throw ConfigError(key + ": unknown key (" + source + ":" + std::to_string(lines[key]) + ")");
    }
  }
  cfg.validate();
  return cfg;
}

SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

void write_config(std::ostream& out, const SystemConfig& c) {
  auto put = [&out](const char* key, const std::string& value) { out << key << " = " << value << '\n'; };
  auto num = [&](const char* key, double v) { put(key, format_double(v)); };
  auto integer = [&](const char* key, long long v) { put(key, std::to_string(v)); };
  out << "# ma-dfrc configuration (canonical SI units)\n";
  integer("num_antennas", c.num_antennas);
  integer("num_users", c.num_users);
  integer("num_paths", c.num_paths);
  num("wavelength_m", c.wavelength);
  num("min_spacing_m", c.min_spacing);
  num("region_length_m", c.region_length);
  num("target_angle_rad", c.target_angle);
  num("power_w", c.total_power);
  num("gamma_linear", c.radar_snr_threshold);
  num("epsilon", c.covertness_level);
  integer("detection_samples", c.detection_samples);
  put("kappa_mode", c.kappa_mode == KappaMode::PerSample ? "per_sample" : "unscaled");
  num("alpha_gain_linear", c.reflection_gain);
  num("beta_gain_linear", c.willie_gain);
  num("willie_distance_m", c.willie_distance);
  num("noise_user_w", c.noise_user);
  num("noise_radar_w", c.noise_radar);
  num("noise_willie_w", c.noise_willie);
  num("path_loss_ref_linear", c.path_loss_ref);
  num("path_loss_exponent", c.path_loss_exponent);
  num("user_center_x_m", c.user_center_x);
  num("user_center_y_m", c.user_center_y);
  num("user_radius_m", c.user_radius);
  integer("seed", static_cast<long long>(c.rng_seed));
  put("scheme", to_string(c.scheme));
  num("conic_tol", c.conic_tol);
  integer("conic_max_iter", c.conic_max_iter);
  integer("bcd_max_iter", c.bcd_max_iter);
  num("bcd_rel_tol", c.bcd_rel_tol);
  integer("pgd_max_iter", c.pgd_max_iter);
  num("pgd_step_tol_m", c.pgd_step_tol);
  num("line_search_initial", c.line_search_initial);
  num("line_search_shrink", c.line_search_shrink);
  num("line_search_ascent", c.line_search_ascent);
  integer("line_search_max_halvings", c.line_search_max_halvings);
}

void emit_config(const SystemConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file '" + path + "'");
  write_config(out, config);
}

}  // namespace dfrc
