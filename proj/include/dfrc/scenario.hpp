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

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "dfrc/config.hpp"
#include "dfrc/types.hpp"

namespace dfrc {

/// Multipath geometry of the link between the BS and one user.
struct UserPaths {
  RVec angles;        ///< path angles at the BS, radians in [0, pi]
  CVec path_gains;    ///< diagonal of the path-response matrix
  double distance = 0.0;   ///< m
  double large_scale = 0.0;  ///< c_k^2 = C0 * d^-a
};

/// One random realization of the scenario.
struct ChannelSet {
  std::vector<UserPaths> users;
  double target_angle = 0.0;  ///< rad; the target is also the warden

  int num_users() const { return static_cast<int>(users.size()); }

  /// Throws Error if any user has mismatched path counts or angles outside [0, pi].
  void validate(int num_paths) const;
};

/// Users uniform in the configured disc, angles i.i.d. uniform on [0, pi],
/// path gains CN(0, c_k^2 / L). Deterministic in (config, seed).
ChannelSet sample_scenario(const SystemConfig& config, std::uint64_t seed);

/// Text dump with hexfloat values; equal sets give equal bytes.
void write_channel_set(std::ostream& out, const ChannelSet& channels);

}  // namespace dfrc
