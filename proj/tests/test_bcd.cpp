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
#include <algorithm>
#include <cmath>

#include "dfrc/bcd.hpp"
#include "dfrc/covertness.hpp"
#include "instances.hpp"

using namespace dfrc;
using dfrc::testing::random_cvec;
using dfrc::testing::random_psd;
using dfrc::testing::rel_err;

namespace {

DesignProblem default_problem(std::uint64_t seed, const BcdOptions& opts = {}) {
  const SystemConfig c = load_config(DFRC_SOURCE_DIR "/configs/default.cfg");
  return DesignProblem::make(c, sample_scenario(c, seed), opts);
}

// A state with random beams, radar covariance and sorted positions; not
// necessarily feasible.
DesignState random_state(const DesignProblem& p, std::mt19937_64& rng) {
  DesignState s = initialize_state(p);
  const int N = p.num_antennas(), K = p.num_users();
  const double scale = std::sqrt(p.config.total_power / (2.0 * N * K));
  for (int k = 0; k < K; ++k) s.design.W.col(k) = scale * random_cvec(rng, N);
  s.design.R0 = random_psd(rng, N, 2) * (p.config.total_power / (4.0 * N * N));
  std::uniform_real_distribution<double> u(0.0, p.config.region_length);
  RVec t(N);
  for (int n = 0; n < N; ++n) t[n] = u(rng);
  std::sort(t.data(), t.data() + N);
  s.t.values = t;
  std::tie(s.u0, s.u1) = update_receive_filter(p, s);
  const auto h = user_channels(p, t);
  s.rho = update_rho(s.design, h, p.config.noise_user);
  s.upsilon = update_upsilon(s.design, h, p.config.noise_user);
  return s;
}

double fd_error(const std::function<double(const RVec&)>& f, const RVec& g, const RVec& t) {
  const double h = 1e-7;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    RVec a = t, b = t;
    a[i] += h;
    b[i] -= h;
    worst = std::max(worst, std::abs((f(a) - f(b)) / (2 * h) - g[i]));
  }
  return worst / std::max(g.lpNorm<Eigen::Infinity>(), 1e-300);
}

// Projection onto { 0 <= t_1, t_{i+1} - t_i >= d, t_N <= D } by Dykstra's
// alternating projections over the individual half-spaces.
RVec linear_projection_oracle(const RVec& m, double d, double D) {
  const Eigen::Index N = m.size();
  const Eigen::Index H = N + 1;  // gaps, then the two region bounds
  std::vector<RVec> corr(static_cast<std::size_t>(H), RVec::Zero(N));
  RVec x = m;
  for (int sweep = 0; sweep < 200000; ++sweep) {
    const RVec before = x;
    for (Eigen::Index h = 0; h < H; ++h) {
      RVec y = x + corr[static_cast<std::size_t>(h)];
      RVec p = y;
      if (h < N - 1) {
        const double gap = y[h + 1] - y[h];
        if (gap < d) {
          p[h] += 0.5 * (gap - d);
          p[h + 1] -= 0.5 * (gap - d);
        }
      } else if (h == N - 1) {
        p[0] = std::max(p[0], 0.0);
      } else {
        p[N - 1] = std::min(p[N - 1], D);
      }
      corr[static_cast<std::size_t>(h)] = y - p;
      x = p;
    }
    if ((x - before).norm() < 1e-15 && sweep > 10) break;
  }
  return x;
}

}  // namespace

TEST_SUITE("bcd") {

TEST_CASE("surrogates are tight at their optimal auxiliaries") {
  std::mt19937_64 rng(31);
  const DesignProblem p = default_problem(1);
  for (int trial = 0; trial < 20; ++trial) {
    const DesignState s = random_state(p, rng);
    const auto h = user_channels(p, s.t.values);
    const double noise = p.config.noise_user;
    const double rate = covert_sum_rate(s.design, h, noise) * std::log(2.0);
    CHECK(rel_err(objective_f1(s.design, h, s.rho, noise), rate) < 1e-10);
    CHECK(rel_err(objective_f2(s.design, h, s.rho, s.upsilon, noise), rate) < 1e-10);
    // any other auxiliaries give a lower bound
    const RVec rho = s.rho.cwiseProduct(RVec::Constant(s.rho.size(), 1.3));
    const RVec ups = s.upsilon * 0.8;
    CHECK(objective_f1(s.design, h, rho, noise) <= rate * (1 + 1e-12));
    CHECK(objective_f2(s.design, h, s.rho, ups, noise) <= rate * (1 + 1e-12));
  }
}

TEST_CASE("rank-one recovery keeps the objective terms and the total covariance") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 50; ++trial) {
    const int N = 4, K = 3;
    std::vector<CMat> users;
    std::vector<CVec> h;
    CMat total = random_psd(rng, N, 1 + trial % 3);
    for (int k = 0; k < K; ++k) {
      users.push_back(random_psd(rng, N, 1 + (trial + k) % 3));
      total += users.back();
      h.push_back(random_cvec(rng, N));
    }
    const BeamformingDesign d = recover_rank_one(total, users, h);
    CHECK((d.transmit_covariance() - total).norm() < 1e-10 * total.norm());
    CHECK(min_eigenvalue(d.R0) >= -1e-9);
    for (int k = 0; k < K; ++k) {
      const double relaxed = (h[k].adjoint() * users[k] * h[k])(0).real();
      CHECK(rel_err(std::norm(h[k].dot(d.W.col(k))), relaxed) < 1e-10);
      CHECK(min_eigenvalue(users[k] - d.W.col(k) * d.W.col(k).adjoint()) >= -1e-9 * users[k].norm());
    }
  }
}

TEST_CASE("rank-one recovery: rank-one input and zero-power user") {
  std::mt19937_64 rng(33);
  const CVec v = random_cvec(rng, 3), h = random_cvec(rng, 3);
  const CMat R = v * v.adjoint();
  BeamformingDesign d = recover_rank_one(R, {R}, {h});
  // w = v up to a global phase
  CHECK(std::abs(std::abs(v.dot(d.W.col(0))) - v.squaredNorm()) < 1e-10 * v.squaredNorm());
  CHECK(d.R0.norm() < 1e-10 * R.norm());
  // h orthogonal to the range of R_k
  CVec g = random_cvec(rng, 3);
  g -= v * (v.dot(g) / v.squaredNorm());
  d = recover_rank_one(R, {R}, {g});
  CHECK(d.W.col(0).norm() == 0.0);
  CHECK((d.R0 - R).norm() < 1e-12);
}

TEST_CASE("relaxed problem objective equals F2 at an encoded design") {
  std::mt19937_64 rng(34);
  const DesignProblem p = default_problem(2);
  for (int trial = 0; trial < 10; ++trial) {
    const DesignState s = random_state(p, rng);
    const SdrSubproblem sdr = build_sdr_subproblem(p, s);
    const RVec x = encode_design(sdr, p, s);
    const auto h = user_channels(p, s.t.values);
    const double f2 = objective_f2(s.design, h, s.rho, s.upsilon, p.config.noise_user);
    CHECK(rel_err(sdr.constant - sdr.problem.c.dot(x), f2) < 1e-9);
    CHECK((sdr.problem.A * x - sdr.problem.b).norm() < 1e-9 * (1.0 + sdr.problem.b.norm()));
    const RelaxedCovariances cov = extract_covariances(sdr, x, p.config.total_power);
    CHECK((cov.total - s.design.transmit_covariance()).norm() < 1e-9 * cov.total.norm());
  }
}

TEST_CASE("covertness row is slack at zero beams") {
  const DesignProblem p = default_problem(3);
  DesignState s = initialize_state(p);
  s.design.W.setZero();
  CHECK(state_covert_ratio(p, s) == 1.0);
  CHECK(covert_margin_of_t(p, s, s.t.values) <= p.kappa - 1.0);
}

TEST_CASE("single user without radar or covertness gets the matched filter at full power") {
  SystemConfig c = load_config(DFRC_SOURCE_DIR "/configs/default.cfg");
  c.num_users = 1;
  c.radar_snr_threshold = 0.0;
  // The quadratic transform raises |h^H w| by about noise / |h^H w| per pass,
  // so the fixed point is reached quickly only near 0 dB SNR.
  c.noise_user = 1e-7;
  const DesignProblem p = DesignProblem::make(c, sample_scenario(c, 4), BcdOptions{false, false, false});
  DesignState s = initialize_state(p);
  for (int i = 0; i < 30; ++i) {
    const auto h = user_channels(p, s.t.values);
    s.rho = update_rho(s.design, h, c.noise_user);
    s.upsilon = update_upsilon(s.design, h, c.noise_user);
    update_beamforming(p, s);
  }
  const CVec h = user_channels(p, s.t.values)[0];
  const CVec w = s.design.W.col(0);
  CHECK(std::abs(h.dot(w)) / (h.norm() * w.norm()) > 1.0 - 1e-6);
  CHECK(w.squaredNorm() == doctest::Approx(c.total_power).epsilon(1e-5));
}

TEST_CASE("beamforming update never lowers F2 and stays feasible") {
  const DesignProblem p = default_problem(5);
  DesignState s = initialize_state(p);
  for (int i = 0; i < 4; ++i) {
    const auto h = user_channels(p, s.t.values);
    s.rho = update_rho(s.design, h, p.config.noise_user);
    s.upsilon = update_upsilon(s.design, h, p.config.noise_user);
    const double before = objective_f2(s.design, h, s.rho, s.upsilon, p.config.noise_user);
    update_beamforming(p, s);
    CHECK(objective_f2(s.design, h, s.rho, s.upsilon, p.config.noise_user) >= before - 1e-9 * std::abs(before));
    CHECK(audit_design(p, s).passed());
  }
}

TEST_CASE("position gradients match central differences") {
  std::mt19937_64 rng(35);
  const DesignProblem p = default_problem(6);
  for (int trial = 0; trial < 20; ++trial) {
    const DesignState s = random_state(p, rng);
    const RVec& t = s.t.values;
    CHECK(fd_error([&](const RVec& q) { return f2_of_t(p, s, q); }, f2_gradient(p, s, t), t) < 1e-5);
    CHECK(fd_error([&](const RVec& q) { return radar_snr_of_t(p, s, q); }, radar_snr_gradient(p, s, t), t) < 1e-5);
    CHECK(fd_error([&](const RVec& q) { return covert_margin_of_t(p, s, q); }, covert_margin_gradient(p, s, t), t) <
          1e-5);
  }
}

TEST_CASE("curvature bounds dominate sampled hessians") {
  std::mt19937_64 rng(36);
  const DesignProblem p = default_problem(7);
  const DesignState s = random_state(p, rng);
  const auto [d0, d1] = compute_lipschitz_deltas(p, s);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto norm_of = [&](const std::function<RVec(const RVec&)>& grad, const RVec& t) {
    RMat H(t.size(), t.size());
    const double h = 1e-6;
    for (Eigen::Index j = 0; j < t.size(); ++j) {
      RVec a = t, b = t;
      a[j] += h;
      b[j] -= h;
      H.col(j) = (grad(a) - grad(b)) / (2 * h);
    }
    return Eigen::SelfAdjointEigenSolver<RMat>(0.5 * (H + H.transpose())).eigenvalues().cwiseAbs().maxCoeff();
  };
  for (int i = 0; i < 20; ++i) {
    RVec t(4);
    for (int n = 0; n < 4; ++n) t[n] = u(rng);
    CHECK(norm_of([&](const RVec& q) { return radar_snr_gradient(p, s, q); }, t) <= d0 * (1 + 1e-6));
    CHECK(norm_of([&](const RVec& q) { return covert_margin_gradient(p, s, q); }, t) <= d1 * (1 + 1e-6));
  }
}

TEST_CASE("linear position projection matches alternating projections") {
  std::mt19937_64 rng(37);
  std::normal_distribution<double> g(0.5, 0.4);
  for (int trial = 0; trial < 30; ++trial) {
    RVec m(4);
    for (int n = 0; n < 4; ++n) m[n] = g(rng);
    const auto proj = project_positions(m, m, 0.05, 1.0, 0.1, std::nullopt, std::nullopt);
    REQUIRE(proj.has_value());
    const RVec oracle = linear_projection_oracle(m, 0.05, 1.0);
    CHECK((*proj - oracle).norm() < 1e-9);
    CHECK(AntennaPositions{*proj}.max_violation(0.05, 1.0) <= 1e-12);
  }
}

TEST_CASE("projection of a feasible point is the identity") {
  const RVec m = (RVec(3) << 0.1, 0.3, 0.9).finished();
  const auto proj = project_positions(m, m, 0.05, 1.0, 0.1, std::nullopt, std::nullopt);
  REQUIRE(proj.has_value());
  CHECK(*proj == m);
}

TEST_CASE("projection with quadratic models meets the model constraints") {
  std::mt19937_64 rng(38);
  std::uniform_real_distribution<double> u(-0.02, 0.02);
  for (int trial = 0; trial < 20; ++trial) {
    // strictly feasible anchor: spacing above d, both models with slack
    const RVec anchor = AntennaPositions::centered_grid(4, 0.1, 1.0).values;
    RVec m = anchor;
    for (int n = 0; n < 4; ++n) m[n] += 5 * u(rng);
    QuadraticModel lo{1.0, testing::random_rvec(rng, 4), 50.0, 0.99};
    QuadraticModel up{0.0, testing::random_rvec(rng, 4), 50.0, 0.01};
    const auto proj = project_positions(m, anchor, 0.05, 1.0, 0.1, lo, up);
    REQUIRE(proj.has_value());
    const RVec dt = *proj - anchor;
    CHECK(lo.value + lo.gradient.dot(dt) - 0.5 * lo.curvature * dt.squaredNorm() >= lo.threshold - 1e-6);
    CHECK(up.value + up.gradient.dot(dt) + 0.5 * up.curvature * dt.squaredNorm() <= up.threshold + 1e-6);
    CHECK(AntennaPositions{*proj}.max_violation(0.05, 1.0) <= 1e-9);
    // the anchor is feasible, so the projection is no farther from m than it
    CHECK((*proj - m).norm() <= (anchor - m).norm() + 1e-7);
  }
}

TEST_CASE("repair puts positions on the linear set") {
  const RVec p = (RVec(4) << -0.2, 0.0, 0.01, 1.3).finished();
  CHECK(AntennaPositions{repair_positions(p, 0.05, 1.0)}.max_violation(0.05, 1.0) <= 1e-12);
}

TEST_CASE("receive filter is the matched filter and beats random filters") {
  std::mt19937_64 rng(39);
  const DesignProblem p = default_problem(8);
  const DesignState s = random_state(p, rng);
  const CVec ar = steering_vector(p.target_angle, s.r.values, p.config.wavelength);
  CHECK(std::abs(s.u0.dot(ar)) / (s.u0.norm() * ar.norm()) > 1.0 - 1e-9);
  const double best = state_radar_snr(p, s);
  for (int i = 0; i < 100; ++i) {
    const CVec u = random_cvec(rng, 4);
    CHECK(radar_snr(s.design.R0, s.t.values, s.r.values, u, p.target_angle, p.config.wavelength,
                    p.config.reflection_gain, p.config.noise_radar) <= best * (1 + 1e-12));
  }
}

TEST_CASE("receive position update is a no-op at the matched filter") {
  std::mt19937_64 rng(40);
  const DesignProblem p = default_problem(9);
  DesignState s = random_state(p, rng);
  const double before = state_radar_snr(p, s);
  s.r = pgd_update_r(p, s);
  CHECK(rel_err(state_radar_snr(p, s), before) < 1e-9);
}

TEST_CASE("receive position update raises a mismatched filter's gain") {
  std::mt19937_64 rng(41);
  const DesignProblem p = default_problem(10);
  DesignState s = random_state(p, rng);
  s.u0 = random_cvec(rng, 4).normalized();
  const double before = state_radar_snr(p, s);
  s.r = pgd_update_r(p, s);
  CHECK(state_radar_snr(p, s) > before);
  CHECK(s.r.feasible(p.config.min_spacing, p.config.region_length));
}

TEST_CASE("initialization is feasible or names the violated constraint") {
  const DesignProblem p = default_problem(11);
  const DesignState s = initialize_state(p);
  CHECK(audit_design(p, s).passed());
  CHECK(s.trace.size() == 1);
  SystemConfig c = p.config;
  c.radar_snr_threshold = 1e9;
  const DesignProblem q = DesignProblem::make(c, sample_scenario(c, 11));
  try {
    initialize_state(q);
    FAIL("expected an infeasible initialization");
  } catch (const InfeasibleError& e) {
    CHECK(std::string(e.what()).find("radar SNR") != std::string::npos);
  }
}

TEST_CASE("transmit PGD keeps feasibility and does not lower F2") {
  const DesignProblem p = default_problem(12);
  DesignState s = initialize_state(p);
  bcd_iteration(p, s);
  const double before = f2_of_t(p, s, s.t.values);
  PgdReport rep;
  s.t = pgd_update_t(p, s, &rep);
  CHECK(f2_of_t(p, s, s.t.values) >= before - 1e-9 * std::abs(before));
  CHECK(audit_design(p, s).passed());
}

TEST_CASE("outer loop: monotone trace and feasible result") {
  SystemConfig c = load_config(DFRC_SOURCE_DIR "/configs/default.cfg");
  c.bcd_max_iter = 10;
  for (std::uint64_t seed : {2u, 13u}) {
    const DesignProblem p = DesignProblem::make(c, sample_scenario(c, seed));
    const DesignState s = run_bcd(p);
    REQUIRE(s.trace.size() >= 2);
    for (std::size_t k = 1; k < s.trace.size(); ++k) {
      CHECK(s.trace[k].iteration == static_cast<int>(k));
      CHECK(s.trace[k].f1 >= s.trace[k - 1].f1 - 1e-6);
    }
    CHECK(audit_design(p, s).passed());
    CHECK(s.trace.back().rate_bits == doctest::Approx(s.trace.back().f1 / std::log(2.0)));
  }
}

TEST_CASE("loosening radar and covertness constraints does not lower the rate") {
  SystemConfig c = load_config(DFRC_SOURCE_DIR "/configs/default.cfg");
  c.bcd_max_iter = 15;
  const ChannelSet ch = sample_scenario(c, 2);
  const DesignState tight = run_bcd(DesignProblem::make(c, ch));
  SystemConfig loose = c;
  loose.radar_snr_threshold = 0.0;
  loose.covertness_level = 1.0;
  const DesignProblem lp = DesignProblem::make(loose, ch);
  DesignState warm = tight;
  warm.trace.clear();
  const DesignState relaxed = run_bcd(lp, warm);
  CHECK(relaxed.trace.back().rate_bits >= tight.trace.back().rate_bits - 1e-9);
}

}
