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

#include <sstream>

#include "dfrc/conic.hpp"
#include "instances.hpp"

using namespace dfrc;
using namespace dfrc::conic;
using dfrc::testing::KnownInstance;

TEST_SUITE("conic") {

TEST_CASE("vectorizations preserve inner products and invert") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 4;
    RMat A(n, n), B(n, n);
    for (int j = 0; j < n; ++j) A.col(j) = testing::random_rvec(rng, n), B.col(j) = testing::random_rvec(rng, n);
    A = (0.5 * (A + A.transpose())).eval();
    B = (0.5 * (B + B.transpose())).eval();
    CHECK(svec(A).dot(svec(B)) == doctest::Approx((A * B).trace()).epsilon(1e-12));
    CHECK((smat(svec(A), n) - A).norm() < 1e-12);
    const CMat C = testing::random_psd(rng, n, 2), D = testing::random_psd(rng, n, 3);
    CHECK(hvec(C).dot(hvec(D)) == doctest::Approx((C * D).trace().real()).epsilon(1e-12));
    CHECK((hmat(hvec(C), n) - C).norm() < 1e-12);
  }
}

TEST_CASE("cone dimensions and degrees") {
  CHECK(Cone::nonnegative(3).dim() == 3);
  CHECK(Cone::second_order(4).degree() == 1);
  CHECK(Cone::symmetric_psd(3).dim() == 6);
  CHECK(Cone::hermitian_psd(3).dim() == 9);
  CHECK(Cone::hermitian_psd(3).degree() == 3);
}

TEST_CASE("known optima of random instances") {
  std::mt19937_64 rng(22);
  for (int i = 0; i < 40; ++i) {
    const KnownInstance k = testing::known_instance(rng, i);
    CAPTURE(k.kind);
    const ConicSolution sol = solve(k.problem);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(std::abs(sol.primal_objective - k.optimum) <= 1e-6 * (1.0 + std::abs(k.optimum)));
    CHECK(check_certificates(k.problem, sol).passed());
    CHECK(testing::independent_cone_margin(k.problem, sol.x) >= -1e-8 * (1.0 + sol.x.norm()));
    CHECK(testing::independent_cone_margin(k.problem, sol.s) >= -1e-8 * (1.0 + sol.s.norm()));
  }
}

TEST_CASE("infeasible problem gives a Farkas certificate") {
  ConicProblem p;
  p.c = RVec::Ones(2);
  p.A = RMat::Ones(1, 2);
  p.b = RVec::Constant(1, -1.0);
  p.cones = {Cone::nonnegative(2)};
  const ConicSolution sol = solve(p);
  REQUIRE(sol.status == SolveStatus::Infeasible);
  CHECK(check_certificates(p, sol).passed());
  CHECK(p.b.dot(sol.y) == doctest::Approx(1.0));
}

TEST_CASE("unbounded problem gives a ray") {
  ConicProblem p;
  p.c = (RVec(2) << -1.0, 0.0).finished();
  p.A = (RMat(1, 2) << 1.0, -1.0).finished();
  p.b = RVec::Zero(1);
  p.cones = {Cone::nonnegative(2)};
  const ConicSolution sol = solve(p);
  REQUIRE(sol.status == SolveStatus::Unbounded);
  CHECK(check_certificates(p, sol).passed());
}

TEST_CASE("certificate audit rejects a perturbed solution") {
  std::mt19937_64 rng(23);
  const KnownInstance k = testing::max_eig_sdp(rng, 3);
  ConicSolution sol = solve(k.problem);
  REQUIRE(check_certificates(k.problem, sol).passed());
  ConicSolution bad = sol;
  bad.x *= 1.01;
  CHECK_FALSE(check_certificates(k.problem, bad).passed());
  bad = sol;
  bad.s[0] -= 1.0;
  CHECK_FALSE(check_certificates(k.problem, bad).passed());
}

TEST_CASE("plain path following reaches the same optimum") {
  std::mt19937_64 rng(24);
  const KnownInstance k = testing::orthant_distance(rng, 4);
  SolverOptions o;
  o.predictor_corrector = false;
  const ConicSolution sol = solve(k.problem, o);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.primal_objective == doctest::Approx(k.optimum).epsilon(1e-6));
}

TEST_CASE("problem text round trip") {
  std::mt19937_64 rng(25);
  const KnownInstance k = testing::two_block_hermitian_sdp(rng, 2, 3);
  std::stringstream s;
  write_problem(s, k.problem);
  const ConicProblem q = read_problem(s);
  CHECK(q.c == k.problem.c);
  CHECK(q.A == k.problem.A);
  CHECK(q.b == k.problem.b);
  REQUIRE(q.cones.size() == 2);
  CHECK(q.cones[1].kind == ConeKind::HermitianPsd);
}

TEST_CASE("inconsistent dimensions are rejected") {
  ConicProblem p;
  p.c = RVec::Ones(3);
  p.A = RMat::Ones(1, 2);
  p.b = RVec::Ones(1);
  p.cones = {Cone::nonnegative(3)};
  CHECK_THROWS_AS(p.validate(), Error);
}

}
