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

// dfrc: command-line front end.
//
//   dfrc run <experiment> --config <path> --seeds <n> --out <dir> --format csv,json,svg [--grid v1,v2]
//   dfrc validate --config <path> [--seeds <n>]
//   dfrc solve --config <path> [--scheme ma|fpa|gas|upper] [--seed <s>]

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "dfrc/baselines.hpp"
#include "dfrc/experiments.hpp"
#include "dfrc/scenario.hpp"
#include "dfrc/validate.hpp"

namespace {

dfrc::SystemConfig load(const std::string& path, const std::optional<std::uint64_t>& seed) {
  dfrc::SystemConfig config = dfrc::load_config(path);
  if (seed) config.rng_seed = *seed;
  return config;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      if (!cur.empty()) parts.push_back(cur);
      cur.clear();
    } else if (ch != ' ') {
      cur += ch;
    }
  }
  if (!cur.empty()) parts.push_back(cur);
  return parts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Covert movable-antenna DFRC design and experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", dfrc::version_string());

  std::string config_path;
  std::optional<std::uint64_t> seed;
  int seeds = 0;
  int threads = 0;

  auto* run = app.add_subcommand("run", "Run an experiment and write its results");
  std::string experiment, out_dir = "results", formats = "csv,json,svg";
  bool quiet = false;
  run->add_option("experiment", experiment, "convergence | power | snr | epsilon")
      ->required()
      ->check(CLI::IsMember(dfrc::experiment_names()));
  run->add_option("--config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
  run->add_option("--seeds", seeds, "Number of scenario seeds")->default_val(50)->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "First seed (overrides the config)");
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run->add_option("--format", formats, "Comma-separated subset of csv,json,svg")->capture_default_str();
  run->add_option("--threads", threads, "Worker threads (0: all cores)")->capture_default_str();
  std::vector<double> grid;
  run->add_option("--grid", grid, "Override the swept values (array sizes for convergence)")->delimiter(',');
  run->add_flag("--quiet", quiet, "No progress output");

  auto* validate = app.add_subcommand("validate", "Check a configuration and the solver properties on it");
  int validate_seeds = 1;
  validate->add_option("--config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
  validate->add_option("--seeds", validate_seeds, "Scenario seeds to solve")->capture_default_str();
  validate->add_option("--seed", seed, "First seed (overrides the config)");

  auto* solve = app.add_subcommand("solve", "Solve one scenario and print the trace as CSV");
  std::string scheme_name;
  solve->add_option("--config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
  solve->add_option("--seed", seed, "Scenario seed (overrides the config)");
  solve->add_option("--scheme", scheme_name, "ma | fpa | gas | upper (default: from the config)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const dfrc::SystemConfig config = load(config_path, seed);
      const std::vector<std::string> fmts = split(formats);
      for (const auto& f : fmts) {
        if (f != "csv" && f != "json" && f != "svg") {
          std::cerr << "error: unknown format '" << f << "'\n";
          return 2;
        }
      }
      dfrc::ExperimentOptions options;
      options.threads = threads;
      if (!quiet) {
        options.progress = [](std::size_t done, std::size_t total) {
          std::fprintf(stderr, "\r%zu/%zu", done, total);
          if (done == total) std::fprintf(stderr, "\n");
        };
      }
      const auto result = dfrc::run_experiment(experiment, config, dfrc::seed_list(config, seeds), options, grid);
      for (const auto& path : dfrc::emit(result, fmts, out_dir)) std::cout << path << '\n';
      return 0;
    }

    if (*validate) {
      const dfrc::SystemConfig config = load(config_path, seed);
      int failed = 0;
      for (const auto& check : dfrc::validate_config(config, validate_seeds)) {
        std::cout << (check.passed ? "ok   " : "FAIL ") << check.name;
        if (!check.detail.empty()) std::cout << "  (" << check.detail << ")";
        std::cout << '\n';
        failed += check.passed ? 0 : 1;
      }
      std::cout << (failed ? std::to_string(failed) + " check(s) failed\n" : std::string("all checks passed\n"));
      return failed ? 1 : 0;
    }

    if (*solve) {
      const dfrc::SystemConfig config = load(config_path, seed);
      const dfrc::Scheme scheme = scheme_name.empty() ? config.scheme : dfrc::scheme_from_string(scheme_name);
      const dfrc::ChannelSet channels = dfrc::sample_scenario(config, config.rng_seed);
      const dfrc::DesignState state = dfrc::solve_scheme(scheme, config, channels);
      dfrc::write_trace_csv(std::cout, state.trace);
      for (const auto& w : state.warnings) std::cerr << "warning: " << w << '\n';
      const auto report = dfrc::audit_design(
          dfrc::DesignProblem::make(config, channels,
                                    scheme == dfrc::Scheme::UpperBound ? dfrc::BcdOptions{true, true, false}
                                    : scheme == dfrc::Scheme::MovableAntenna ? dfrc::BcdOptions{}
                                                                             : dfrc::BcdOptions{false, false, true}),
          state);
      for (const auto& f : report.failures) std::cerr << "audit: " << f << '\n';
      return report.passed() ? 0 : 1;
    }
  } catch (const dfrc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
