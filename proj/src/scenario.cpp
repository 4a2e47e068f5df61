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

#include "dfrc/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

namespace dfrc {

void ChannelSet::validate(int num_paths) const {
  for (std::size_t k = 0; k < users.size(); ++k) {
    const auto& u = users[k];
    if (u.angles.size() != num_paths || u.path_gains.size() != num_paths) {
      throw Error("channel set: user " + std::to_string(k) + " does not have " +
                  std::to_string(num_paths) + " paths");
    }
    for (Eigen::Index j = 0; j < u.angles.size(); ++j) {
      if (!(u.angles[j] >= 0.0 && u.angles[j] <= kPi)) {
        throw Error("channel set: user " + std::to_string(k) + " has a path angle outside [0, pi]");
      }
    }
  }
}

ChannelSet sample_scenario(const SystemConfig& config, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  ChannelSet set;
  set.target_angle = config.target_angle;
  const int L = config.num_paths;
  for (int k = 0; k < config.num_users; ++k) {
    UserPaths user;
    // Uniform in the disc: radius ~ R sqrt(U).
    const double radius = config.user_radius * std::sqrt(unit(rng));
    const double theta = 2.0 * kPi * unit(rng);
    const double x = config.user_center_x + radius * std::cos(theta);
    const double y = config.user_center_y + radius * std::sin(theta);
    user.distance = std::hypot(x, y);
    user.large_scale = config.path_loss_ref * std::pow(user.distance, -config.path_loss_exponent);

    user.angles.resize(L);
    for (int j = 0; j < L; ++j) user.angles[j] = kPi * unit(rng);

    const double sd = std::sqrt(user.large_scale / (2.0 * L));
    user.path_gains.resize(L);
    for (int j = 0; j < L; ++j) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      user.path_gains[j] = cdouble(sd * re, sd * im);
    }
    set.users.push_back(std::move(user));
  }
  return set;
}

void write_channel_set(std::ostream& out, const ChannelSet& channels) {
  char buf[64];
  auto hex = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%a", v);
    return std::string(buf);
  };
  out << "target_angle " << hex(channels.target_angle) << '\n';
  for (std::size_t k = 0; k < channels.users.size(); ++k) {
    const auto& u = channels.users[k];
    out << "user " << k << " distance " << hex(u.distance) << " c2 " << hex(u.large_scale) << '\n';
    for (Eigen::Index j = 0; j < u.angles.size(); ++j) {
      out << "  path " << j << ' ' << hex(u.angles[j]) << ' ' << hex(u.path_gains[j].real()) << ' '
          << hex(u.path_gains[j].imag()) << '\n';
    }
  }
}

}  // namespace dfrc
