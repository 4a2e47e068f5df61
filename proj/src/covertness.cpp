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

#include "dfrc/covertness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace dfrc {

void DetectionSetup::validate() const {
  if (!(eta0 > 0.0)) throw Error("detection setup: eta0 must be positive");
  if (!(eta1 >= eta0)) throw Error("detection setup: eta1 must be >= eta0");
  if (samples < 1) throw Error("detection setup: sample count must be >= 1");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw Error("detection setup: epsilon must lie in [0, 1]");
}

double kl_divergence(double eta0, double eta1, int samples) {
  if (!(eta0 > 0.0) || !(eta1 > 0.0)) throw Error("kl_divergence: powers must be positive");
  if (samples < 1) throw Error("kl_divergence: sample count must be >= 1");
  const double x = eta1 / eta0;
  return samples * (std::log(x) + 1.0 / x - 1.0);
}

namespace {

double kl_shape(double x) { return std::log(x) + 1.0 / x - 1.0; }

}  // namespace

double solve_kappa(double epsilon, int samples, KappaMode mode) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw Error("solve_kappa: epsilon must lie in [0, 1]");
  if (samples < 1) throw Error("solve_kappa: sample count must be >= 1");
  if (epsilon == 0.0) return 1.0;
  const double rhs = 2.0 * epsilon * epsilon / (mode == KappaMode::PerSample ? samples : 1);

  // Bracket by doubling from [1, 2]; kl_shape is increasing on [1, inf).
  double lo = 1.0;
  double hi = 2.0;
  int iter = 0;
  while (kl_shape(hi) < rhs && iter < 200) {
    lo = hi;
    hi *= 2.0;
    ++iter;
  }
  for (; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (kl_shape(mid) < rhs) lo = mid;
    else hi = mid;
  }
  // Pick the endpoint with the smaller residual.
  return std::abs(kl_shape(lo) - rhs) <= std::abs(kl_shape(hi) - rhs) ? lo : hi;
}

double covertness_ratio_bound(const SystemConfig& config) {
  return solve_kappa(config.covertness_level, config.detection_samples, config.kappa_mode);
}

double optimal_threshold(double eta0, double eta1, int samples) {
  if (!(eta0 > 0.0)) throw Error("optimal_threshold: eta0 must be positive");
  if (!(eta1 > eta0)) {
    throw Error("optimal_threshold: hypotheses are indistinguishable (eta1 <= eta0)");
  }
  return samples * eta0 * eta1 / (eta1 - eta0) * std::log(eta1 / eta0);
}

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0)) throw Error("regularized_gamma_p: shape must be positive");
  if (x < 0.0) throw Error("regularized_gamma_p: argument must be nonnegative");
  if (x == 0.0) return 0.0;
  const double log_prefix = a * std::log(x) - x - std::lgamma(a);
  constexpr double eps = 1e-16;
  if (x < a + 1.0) {
    // Series: P = x^a e^-x / Gamma(a+1) * sum x^n / ((a+1)...(a+n))
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 10000; ++n) {
      term *= x / (a + n);
      sum += term;
      if (std::abs(term) < std::abs(sum) * eps) break;
    }
    return std::min(1.0, sum * std::exp(log_prefix));
  }
  // Continued fraction for Q via modified Lentz.
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < eps) break;
  }
  const double q = std::exp(log_prefix) * h;
  return std::max(0.0, 1.0 - q);
}

double min_dep_exact(double eta0, double eta1, int samples) {
  if (!(eta0 > 0.0) || !(eta1 > 0.0)) throw Error("min_dep_exact: powers must be positive");
  if (samples < 1) throw Error("min_dep_exact: sample count must be >= 1");
  if (eta1 <= eta0) return 1.0;
  const double thr = optimal_threshold(eta0, eta1, samples);
  const double xi = 1.0 - regularized_gamma_p(samples, thr / eta0) + regularized_gamma_p(samples, thr / eta1);
  return std::clamp(xi, 0.0, 1.0);
}

double dep_pinsker_bound(double kl) {
  if (kl < 0.0) throw Error("dep_pinsker_bound: divergence must be nonnegative");
  return 1.0 - std::sqrt(kl / 2.0);
}

DetectionEstimate simulate_detection(double eta0, double eta1, int samples, long long trials,
                                     std::uint64_t seed) {
  if (trials < 1) throw Error("simulate_detection: need at least one trial");
  if (!(eta0 > 0.0) || !(eta1 > 0.0) || samples < 1) throw Error("simulate_detection: invalid setup");
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> unit_exp(1.0);
  // Indistinguishable hypotheses: any threshold is optimal, ties are resolved toward H0.
  const double thr = eta1 > eta0 ? optimal_threshold(eta0, eta1, samples)
                                 : std::numeric_limits<double>::infinity();
  long long misses = 0;
  long long false_alarms = 0;
  for (long long t = 0; t < trials; ++t) {
    double e0 = 0.0;
    double e1 = 0.0;
    for (int m = 0; m < samples; ++m) {
      e0 += eta0 * unit_exp(rng);
      e1 += eta1 * unit_exp(rng);
    }
    if (e0 > thr) ++false_alarms;
    if (e1 <= thr) ++misses;
  }
  DetectionEstimate est;
  est.trials = trials;
  est.miss_detection = static_cast<double>(misses) / trials;
  est.false_alarm = static_cast<double>(false_alarms) / trials;
  est.dep = est.miss_detection + est.false_alarm;
  const double n = static_cast<double>(trials);
  est.std_error = std::sqrt(est.miss_detection * (1.0 - est.miss_detection) / n +
                            est.false_alarm * (1.0 - est.false_alarm) / n);
  return est;
}

}  // namespace dfrc
