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

#include <optional>
#include <vector>

#include "dfrc/bcd.hpp"

namespace dfrc {

/// Proposed scheme: full BCD over beams, transmit and receive positions. Runs
/// from the default start and from the greedy design (`greedy`, computed when
/// absent) and returns the run with the higher final rate.
DesignState solve_ma(const SystemConfig& config, const ChannelSet& channels,
                     const std::optional<DesignState>& greedy = std::nullopt);

/// Positions frozen at the half-wavelength grids.
DesignState solve_fpa(const SystemConfig& config, const ChannelSet& channels);

/// Port positions k * lambda / 2 inside [0, D].
std::vector<double> port_grid(const SystemConfig& config);

/// Greedy antenna selection on the port grid. Antennas start on the central
/// ports; each one in turn moves to the free port that maximizes the sum rate
/// after one frozen-position BCD pass (ties go to the lowest port). Positions
/// are then frozen and BCD runs to convergence.
DesignState solve_gas(const SystemConfig& config, const ChannelSet& channels);

/// BCD without the covertness constraint. With `covert` given, the result is
/// the better of a run from the default start and a run warm-started at the
/// covert design, so it never falls below that design's rate.
DesignState solve_upper_bound(const SystemConfig& config, const ChannelSet& channels,
                              const std::optional<DesignState>& covert = std::nullopt);

/// Dispatches on `scheme`; the upper bound is run without a warm start.
DesignState solve_scheme(Scheme scheme, const SystemConfig& config, const ChannelSet& channels);

}  // namespace dfrc
