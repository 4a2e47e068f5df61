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

#include <string>
#include <vector>

#include "dfrc/config.hpp"

namespace dfrc {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Property checks on a configuration: kappa root, covertness guarantee of
/// the ratio bound, then per seed a full solve with its feasibility audit,
/// trace monotonicity, the surrogate identity at rho = gamma, the radar SNR
/// factorization, rank-one recovery of a relaxed solution, solver
/// certificates and finite-difference gradient checks.
std::vector<CheckResult> validate_config(const SystemConfig& config, int seeds);

}  // namespace dfrc
