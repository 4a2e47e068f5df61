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

#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>

#include "dfrc/covertness.hpp"

using namespace dfrc;

namespace {

// Detection error probability of the threshold test at tau, from Boost's
// regularized incomplete gamma function.
double dep_at(double eta0, double eta1, int M, double tau) {
  return 1.0 - boost::math::gamma_p(M, tau / eta0) + boost::math::gamma_p(M, tau / eta1);
}

}  // namespace

TEST_SUITE("covertness") {

TEST_CASE("kappa: zero epsilon, residual and monotonicity") {
  CHECK(solve_kappa(0.0, 100) == 1.0);
  CHECK(solve_kappa(0.0, 1, KappaMode::Unscaled) == 1.0);
  double prev = 1.0;
  for (double eps : {0.01, 0.05, 0.1, 0.3, 0.5, 0.9, 1.0}) {
    for (int M : {1, 10, 100, 1000}) {
      const double k = solve_kappa(eps, M);
      CHECK(std::abs(std::log(k) + 1.0 / k - 1.0 - 2.0 * eps * eps / M) < 1e-12);
    }
    const double k = solve_kappa(eps, 100);
    CHECK(k > prev);
    prev = k;
  }
  CHECK_THROWS_AS(solve_kappa(-0.1, 10), Error);
  CHECK_THROWS_AS(solve_kappa(0.1, 0), Error);
}

TEST_CASE("kl divergence of the two gamma laws") {
  // D(Gamma(M, eta0) || Gamma(M, eta1)) by numerical integration of p0 ln(p0/p1).
  const double eta0 = 1.0, eta1 = 1.7;
  const int M = 3;
  double acc = 0.0;
  const double h = 1e-3;
  for (double x = h / 2; x < 60.0; x += h) {
    const double p0 = std::pow(x, M - 1) * std::exp(-x / eta0) / (std::tgamma(M) * std::pow(eta0, M));
    const double p1 = std::pow(x, M - 1) * std::exp(-x / eta1) / (std::tgamma(M) * std::pow(eta1, M));
    acc += p0 * std::log(p0 / p1) * h;
  }
  CHECK(kl_divergence(eta0, eta1, M) == doctest::Approx(acc).epsilon(1e-6));
  CHECK(kl_divergence(2.0, 2.0, 7) == 0.0);
}

TEST_CASE("regularized gamma against Boost") {
  for (double a : {1.0, 2.0, 5.0, 30.0, 100.0, 1000.0}) {
    for (double r : {0.01, 0.3, 0.9, 1.0, 1.1, 2.0, 5.0}) {
      const double x = a * r;
      CHECK(std::abs(regularized_gamma_p(a, x) - boost::math::gamma_p(a, x)) < 1e-13);
    }
  }
  CHECK(regularized_gamma_p(3.0, 0.0) == 0.0);
}

TEST_CASE("exact DEP against Boost and the threshold is optimal") {
  for (int M : {1, 5, 20, 100}) {
    for (double ratio : {1.001, 1.02, 1.2, 2.0, 10.0}) {
      const double eta0 = 0.7, eta1 = 0.7 * ratio;
      const double tau = optimal_threshold(eta0, eta1, M);
      const double exact = min_dep_exact(eta0, eta1, M);
      CHECK(std::abs(exact - dep_at(eta0, eta1, M, tau)) < 1e-12);
      for (double s : {0.9, 0.99, 1.01, 1.1}) CHECK(dep_at(eta0, eta1, M, tau * s) >= exact - 1e-12);
    }
  }
  CHECK(min_dep_exact(1.0, 1.0, 10) == 1.0);
  CHECK_THROWS_AS(optimal_threshold(1.0, 1.0, 10), Error);
}

TEST_CASE("Pinsker never exceeds the exact DEP") {
  for (int M : {1, 3, 10, 100, 1000}) {
    for (double ratio = 1.0005; ratio < 20.0; ratio *= 1.3) {
      const double kl = kl_divergence(1.0, ratio, M);
      CHECK(dep_pinsker_bound(kl) <= min_dep_exact(1.0, ratio, M) + 1e-9);
    }
  }
}

TEST_CASE("ratio bound kappa certifies the covertness level") {
  for (double eps : {0.05, 0.1, 0.2}) {
    const double k = solve_kappa(eps, 100);
    CHECK(min_dep_exact(1.0, k, 100) >= 1.0 - eps - 1e-9);
    CHECK(dep_pinsker_bound(kl_divergence(1.0, k, 100)) == doctest::Approx(1.0 - eps).epsilon(1e-10));
  }
}

TEST_CASE("Monte Carlo detector agrees with the exact DEP") {
  const DetectionEstimate e = simulate_detection(1.0, 1.5, 8, 20000, 99);
  CHECK(std::abs(e.dep - min_dep_exact(1.0, 1.5, 8)) < 4.0 * e.std_error);
  CHECK(e.trials == 20000);
  const DetectionEstimate same = simulate_detection(1.0, 1.5, 8, 20000, 99);
  CHECK(same.dep == e.dep);
}

TEST_CASE("detection setup validation") {
  DetectionSetup s;
  CHECK_NOTHROW(s.validate());
  s.eta1 = 0.5;
  CHECK_THROWS_AS(s.validate(), Error);
}

}
