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

#include "dfrc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace dfrc {

namespace {

constexpr BcdOptions kFrozen{false, false, true};

double final_rate(const DesignState& s) { return s.trace.empty() ? -std::numeric_limits<double>::infinity() : s.trace.back().f1; }

}  // namespace

DesignState solve_ma(const SystemConfig& config, const ChannelSet& channels,
                     const std::optional<DesignState>& greedy) {
  const DesignProblem problem = DesignProblem::make(config, channels);
  DesignState best = run_bcd(problem);
  // Local ascent from the central grid can stall far from the better port
  // layouts; a second start from the greedy design keeps MA above GAS.
  std::optional<DesignState> seed = greedy;
  if (!seed) {
    try {
      seed = solve_gas(config, channels);
    } catch (const InfeasibleError&) {
      return best;
    }
  }
  DesignState start = std::move(*seed);
  start.trace.clear();
  start.warnings.clear();
  start.converged = false;
  DesignState warm = run_bcd(problem, std::move(start));
  if (final_rate(warm) > final_rate(best)) best = std::move(warm);
  return best;
}

DesignState solve_fpa(const SystemConfig& config, const ChannelSet& channels) {
  return run_bcd(DesignProblem::make(config, channels, kFrozen));
}

std::vector<double> port_grid(const SystemConfig& config) {
  const double pitch = 0.5 * config.wavelength;
  const auto count = static_cast<int>(std::floor(config.region_length / pitch + 1e-9)) + 1;
  std::vector<double> ports(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) ports[static_cast<std::size_t>(i)] = i * pitch;
  return ports;
}

DesignState solve_gas(const SystemConfig& config, const ChannelSet& channels) {
  const DesignProblem problem = DesignProblem::make(config, channels, kFrozen);
  const std::vector<double> ports = port_grid(config);
  const int P = static_cast<int>(ports.size());
  const int N = config.num_antennas;
  if (P < N) throw InfeasibleError("greedy selection: fewer ports than antennas");
  if (0.5 * config.wavelength < config.min_spacing * (1.0 - 1e-12)) {
    throw InfeasibleError("greedy selection: port pitch is below the minimum spacing");
  }

  std::vector<int> chosen(static_cast<std::size_t>(N));
  for (int n = 0; n < N; ++n) chosen[static_cast<std::size_t>(n)] = (P - N) / 2 + n;
  auto positions = [&](const std::vector<int>& idx) {
    std::vector<int> sorted = idx;
    std::sort(sorted.begin(), sorted.end());
    RVec t(N);
    for (int n = 0; n < N; ++n) t[n] = ports[static_cast<std::size_t>(sorted[static_cast<std::size_t>(n)])];
    return AntennaPositions{t};
  };

  DesignState state = initialize_state(problem, positions(chosen));
  bcd_iteration(problem, state);
  for (int n = 0; n < N; ++n) {
    double best = -std::numeric_limits<double>::infinity();
    std::optional<DesignState> best_state;
    int best_port = chosen[static_cast<std::size_t>(n)];
    for (int p = 0; p < P; ++p) {
      bool taken = false;
      for (int j = 0; j < N; ++j) taken |= j != n && chosen[static_cast<std::size_t>(j)] == p;
      if (taken) continue;
      std::vector<int> idx = chosen;
      idx[static_cast<std::size_t>(n)] = p;
      DesignState trial = state;
      trial.t = positions(idx);
      bcd_iteration(problem, trial);
      if (!audit_design(problem, trial).passed()) continue;
      const double rate = sum_rate_nats(trial.design, user_channels(problem, trial.t.values), config.noise_user);
      if (rate > best) {
        best = rate;
        best_port = p;
        best_state = std::move(trial);
      }
    }
    if (best_state) {
      chosen[static_cast<std::size_t>(n)] = best_port;
      state = std::move(*best_state);
    }
  }
  state.trace.clear();
  state.warnings.clear();
  return run_bcd(problem, std::move(state));
}

DesignState solve_upper_bound(const SystemConfig& config, const ChannelSet& channels,
                              const std::optional<DesignState>& covert) {
  const DesignProblem problem = DesignProblem::make(config, channels, BcdOptions{true, true, false});
  DesignState best = run_bcd(problem);
  if (covert) {
    DesignState start = *covert;
    start.trace.clear();
    start.warnings.clear();
    DesignState warm = run_bcd(problem, std::move(start));
    if (final_rate(warm) > final_rate(best)) best = std::move(warm);
  }
  return best;
}

DesignState solve_scheme(Scheme scheme, const SystemConfig& config, const ChannelSet& channels) {
  switch (scheme) {
    case Scheme::MovableAntenna: return solve_ma(config, channels);
    case Scheme::FixedPosition: return solve_fpa(config, channels);
    case Scheme::GreedySelection: return solve_gas(config, channels);
    case Scheme::UpperBound: return solve_upper_bound(config, channels);
  }
  return solve_ma(config, channels);
}

}  // namespace dfrc
