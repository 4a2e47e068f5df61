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

#include <Eigen/Eigenvalues>
#include <cmath>

#include "dfrc/channel.hpp"
#include "support.hpp"

using namespace dfrc;
using dfrc::testing::random_cvec;
using dfrc::testing::random_psd;

namespace {

constexpr double kLambda = 0.1;

PathSet random_paths(std::mt19937_64& rng, int L) {
  std::uniform_real_distribution<double> u(0.0, kPi);
  PathSet p;
  p.angles.resize(L);
  for (int j = 0; j < L; ++j) p.angles[j] = u(rng);
  p.gains = random_cvec(rng, L);
  return p;
}

RVec random_positions(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RVec p(n);
  for (int i = 0; i < n; ++i) p[i] = u(rng);
  return p;
}

// h_n = conj(sum_j sigma_j exp(j k p_n cos psi_j)), written out term by term.
CVec channel_oracle(const RVec& p, const PathSet& paths) {
  const double k = 2.0 * kPi / kLambda;
  CVec h(p.size());
  for (Eigen::Index n = 0; n < p.size(); ++n) {
    cdouble acc = 0.0;
    for (Eigen::Index j = 0; j < paths.angles.size(); ++j) {
      acc += paths.gains[j] * std::polar(1.0, k * p[n] * std::cos(paths.angles[j]));
    }
    h[n] = std::conj(acc);
  }
  return h;
}

}  // namespace

TEST_SUITE("channel") {

TEST_CASE("steering vector has unit-modulus entries and the right phase") {
  const RVec p = (RVec(3) << 0.0, 0.05, 0.31).finished();
  const CVec a = steering_vector(0.7, p, kLambda);
  for (Eigen::Index n = 0; n < 3; ++n) {
    CHECK(std::abs(a[n]) == doctest::Approx(1.0));
    CHECK(std::arg(a[n] * std::polar(1.0, -2.0 * kPi / kLambda * p[n] * std::cos(0.7))) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("channel vector matches the direct sum") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const PathSet paths = random_paths(rng, 6);
    const RVec p = random_positions(rng, 5);
    CHECK((channel_vector(p, paths, kLambda) - channel_oracle(p, paths)).norm() < 1e-12 * (1.0 + channel_oracle(p, paths).norm()));
    const UserChannel uc = make_user_channel(2, p, paths, kLambda);
    CHECK(uc.user == 2);
    CHECK((uc.h - channel_oracle(p, paths)).norm() < 1e-12 * (1.0 + uc.h.norm()));
    CHECK(uc.frm.rows() == 6);
    CHECK(uc.frm.cols() == 5);
  }
}

TEST_CASE("pseudo paths reproduce the steering vector") {
  std::mt19937_64 rng(4);
  const RVec p = random_positions(rng, 4);
  CHECK((channel_vector(p, steering_pseudo_paths(0.6), kLambda) - steering_vector(0.6, p, kLambda)).norm() < 1e-12);
}

TEST_CASE("quadratic form gradient matches central differences") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const PathSet paths = random_paths(rng, trial % 2 ? 1 : 4);
    const RVec p = random_positions(rng, 4);
    CMat M = random_psd(rng, 4, 2) - random_psd(rng, 4, 1);
    const RVec g = quadform_gradient(p, paths, M, kLambda);
    const double h = 1e-7;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      RVec a = p, b = p;
      a[i] += h;
      b[i] -= h;
      const double fd = (quadform_value(a, paths, M, kLambda) - quadform_value(b, paths, M, kLambda)) / (2 * h);
      worst = std::max(worst, std::abs(fd - g[i]));
    }
    CHECK(worst <= 1e-5 * (1.0 + g.norm()));
  }
}

TEST_CASE("hessian bound dominates finite-difference hessians") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const PathSet paths = random_paths(rng, trial % 2 ? 1 : 3);
    const CMat M = random_psd(rng, 4, 3);
    const double bound = quadform_hessian_bound(paths, M, kLambda);
    for (int s = 0; s < 20; ++s) {
      const RVec p = random_positions(rng, 4);
      RMat H(4, 4);
      const double h = 1e-6;
      for (int j = 0; j < 4; ++j) {
        RVec a = p, b = p;
        a[j] += h;
        b[j] -= h;
        H.col(j) = (quadform_gradient(a, paths, M, kLambda) - quadform_gradient(b, paths, M, kLambda)) / (2 * h);
      }
      const RMat S = 0.5 * (H + H.transpose());
      const double norm = Eigen::SelfAdjointEigenSolver<RMat>(S).eigenvalues().cwiseAbs().maxCoeff();
      CHECK(norm <= bound * (1.0 + 1e-6));
    }
  }
}

TEST_CASE("zero form and single antenna with one path have zero curvature") {
  std::mt19937_64 rng(7);
  const PathSet one = steering_pseudo_paths(0.9);
  CHECK(quadform_hessian_bound(one, CMat::Zero(3, 3), kLambda) == 0.0);
  // N = 1, single path: |a|^2 M is constant in p
  const RVec g = quadform_gradient(RVec::Constant(1, 0.3), one, random_psd(rng, 1, 1), kLambda);
  CHECK(std::abs(g[0]) < 1e-12);
}

TEST_CASE("non-Hermitian form is rejected") {
  std::mt19937_64 rng(8);
  CMat M = random_psd(rng, 3, 3);
  M(0, 1) += cdouble(1.0, 0.0);
  CHECK_THROWS_AS(quadform_gradient(RVec::Zero(3), steering_pseudo_paths(0.5), M, kLambda), Error);
}

TEST_CASE("positions: violation and centred grid") {
  const AntennaPositions g = AntennaPositions::centered_grid(4, 0.05, 1.0);
  CHECK(g.values[0] == doctest::Approx(0.425));
  CHECK(g.values[3] == doctest::Approx(0.575));
  CHECK(g.feasible(0.05, 1.0));
  AntennaPositions bad{(RVec(3) << -0.01, 0.02, 1.5).finished()};
  CHECK(bad.max_violation(0.05, 1.0) == doctest::Approx(0.5));
}

}
