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
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "dfrc/bcd.hpp"
#include "dfrc/config.hpp"

namespace dfrc {

/// Outcome of one (scheme, grid point, seed) run.
struct RunRecord {
  double rate_bits = 0.0;
  int iterations = 0;
  bool ok = false;     ///< solved and passed the feasibility audit
  std::string note;    ///< failure reason when !ok
};

struct SchemeCurve {
  std::string scheme;
  std::vector<double> mean;        ///< over the ok runs of each grid point
  std::vector<double> std_error;
  std::vector<int> count;          ///< ok runs per grid point
  /// raw[g][s] for grid index g and seed index s
  std::vector<std::vector<RunRecord>> raw;
};

struct ConvergenceTrace {
  int num_antennas = 0;
  std::uint64_t seed = 0;
  std::vector<TraceEntry> entries;
};

struct ExperimentResult {
  std::string id;
  std::string parameter;  ///< swept quantity, e.g. "P_t"
  std::string unit;       ///< unit of the grid values as printed, e.g. "dBW"
  std::vector<double> grid;
  std::vector<std::uint64_t> seeds;
  std::vector<SchemeCurve> curves;
  std::vector<ConvergenceTrace> traces;  ///< run_convergence only
  SystemConfig config;
  std::string version;

  const SchemeCurve* curve(const std::string& scheme) const;
};

struct ExperimentOptions {
  int threads = 0;  ///< 0: hardware concurrency
  /// Called after each finished task with (done, total); may be empty.
  std::function<void(std::size_t, std::size_t)> progress;
};

/// Seeds config.rng_seed, config.rng_seed + 1, ...
std::vector<std::uint64_t> seed_list(const SystemConfig& config, int count);

/// Default grids.
std::vector<double> default_power_grid_dbw();
std::vector<double> default_snr_grid_db();
std::vector<double> default_epsilon_grid();
std::vector<int> default_convergence_sizes();

/// Per-iteration traces of the proposed scheme for each array size. Throws
/// Error if any trace loses more than 1e-6 between iterations.
ExperimentResult run_convergence(const SystemConfig& config, const std::vector<std::uint64_t>& seeds,
                                 const std::vector<int>& sizes = default_convergence_sizes(),
                                 const ExperimentOptions& options = {});
ExperimentResult run_power_sweep(const SystemConfig& config, const std::vector<double>& power_dbw,
                                 const std::vector<std::uint64_t>& seeds, const ExperimentOptions& options = {});
ExperimentResult run_snr_tradeoff(const SystemConfig& config, const std::vector<double>& gamma_db,
                                  const std::vector<std::uint64_t>& seeds, const ExperimentOptions& options = {});
ExperimentResult run_epsilon_sweep(const SystemConfig& config, const std::vector<double>& epsilon,
                                   const std::vector<std::uint64_t>& seeds, const ExperimentOptions& options = {});

/// Runs `run_*` by name: convergence, power, snr, epsilon. An empty `grid`
/// selects the default grid (array sizes for convergence).
ExperimentResult run_experiment(const std::string& name, const SystemConfig& config,
                                const std::vector<std::uint64_t>& seeds, const ExperimentOptions& options = {},
                                const std::vector<double>& grid = {});
std::vector<std::string> experiment_names();

/// One row per scheme x grid point x seed.
void write_csv(std::ostream& out, const ExperimentResult& result);
/// Iteration rows of every convergence trace.
void write_trace_csv(std::ostream& out, const ExperimentResult& result);
void write_json(std::ostream& out, const ExperimentResult& result);
ExperimentResult read_json(std::istream& in);
void write_svg(std::ostream& out, const ExperimentResult& result);

/// Writes <id>.csv / <id>.json / <id>.svg (and <id>_traces.csv) into `dir`,
/// creating it if needed. `formats` holds any of "csv", "json", "svg".
std::vector<std::string> emit(const ExperimentResult& result, const std::vector<std::string>& formats,
                              const std::string& dir);

std::string version_string();

}  // namespace dfrc
