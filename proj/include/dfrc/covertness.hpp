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

#include "dfrc/config.hpp"

namespace dfrc {

/// Energy-detector hypothesis test at the warden.
struct DetectionSetup {
  double eta0 = 1.0;  ///< W, received power without covert signals
  double eta1 = 1.0;  ///< W, received power with covert signals
  int samples = 1;
  double epsilon = 0.0;

  void validate() const;
};

/// D(P0 || P1) = M (ln(eta1/eta0) + eta0/eta1 - 1)
double kl_divergence(double eta0, double eta1, int samples);

/// Root kappa >= 1 of ln x + 1/x - 1 = 2 eps^2 / M (PerSample) or 2 eps^2 (Unscaled).
double solve_kappa(double epsilon, int samples, KappaMode mode = KappaMode::PerSample);

/// kappa for the configured covertness level.
double covertness_ratio_bound(const SystemConfig& config);

/// M eta0 eta1 / (eta1 - eta0) ln(eta1/eta0). Throws Error when eta1 <= eta0
/// (indistinguishable hypotheses; the detection error probability is then 1).
double optimal_threshold(double eta0, double eta1, int samples);

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
double regularized_gamma_p(double a, double x);

/// Minimum detection error probability of the optimal threshold test.
double min_dep_exact(double eta0, double eta1, int samples);

/// 1 - sqrt(kl / 2); may be negative.
double dep_pinsker_bound(double kl);

struct DetectionEstimate {
  double dep = 0.0;
  double miss_detection = 0.0;
  double false_alarm = 0.0;
  double std_error = 0.0;
  long long trials = 0;
};

/// Monte-Carlo run of the threshold detector: ||y_w||^2 is drawn as a sum of
/// M exponentials with mean eta_i under each hypothesis.
DetectionEstimate simulate_detection(double eta0, double eta1, int samples, long long trials,
                                     std::uint64_t seed);

}  // namespace dfrc
