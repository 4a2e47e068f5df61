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

#include "dfrc/bcd.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>

#include "dfrc/covertness.hpp"

namespace dfrc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const SystemConfig& cfg(const DesignProblem& p) { return p.config; }

bool has_radar(const DesignProblem& p) { return p.config.radar_snr_threshold > 0.0; }
bool has_covert(const DesignProblem& p) { return p.options.enforce_covertness; }

CMat outer(const CVec& v) { return v * v.adjoint(); }

double real_quad(const CVec& v, const CMat& M) { return (v.adjoint() * M * v)(0, 0).real(); }

// |alpha|^2 |u0^H a_r|^2 / (noise ||u0||^2): the t-independent factor of SNR_0.
double radar_receive_factor(const DesignProblem& p, const DesignState& s) {
  const CVec ar = steering_vector(p.target_angle, s.r.values, cfg(p).wavelength);
  const double uu = s.u0.squaredNorm();
  if (uu == 0.0) throw Error("radar receive filter is zero");
  return cfg(p).reflection_gain * std::norm(s.u0.dot(ar)) / (cfg(p).noise_radar * uu);
}

double willie_factor(const DesignProblem& p) { return cfg(p).willie_gain / cfg(p).noise_willie; }

CMat covert_form(const DesignProblem& p, const DesignState& s) {
  return s.design.transmit_covariance() - p.kappa * s.design.R0;
}

}  // namespace

DesignProblem DesignProblem::make(const SystemConfig& config, const ChannelSet& channels,
                                  const BcdOptions& options) {
  config.validate();
  channels.validate(config.num_paths);
  if (channels.num_users() != config.num_users) {
    throw ConfigError("num_users: channel set has " + std::to_string(channels.num_users()) + " users");
  }
  DesignProblem p;
  p.config = config;
  p.target_angle = channels.target_angle;
  p.options = options;
  p.kappa = options.enforce_covertness ? covertness_ratio_bound(config) : kInf;
  for (const auto& u : channels.users) p.users.push_back({u.angles, u.path_gains});
  return p;
}

std::vector<CVec> user_channels(const DesignProblem& problem, const RVec& t) {
  std::vector<CVec> h;
  h.reserve(problem.users.size());
  for (const auto& paths : problem.users) h.push_back(channel_vector(t, paths, problem.config.wavelength));
  return h;
}

double sum_rate_nats(const BeamformingDesign& design, const std::vector<CVec>& h, double noise) {
  double total = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) total += std::log1p(user_sinr(static_cast<int>(k), design, h[k], noise));
  return total;
}

double objective_f1(const BeamformingDesign& design, const std::vector<CVec>& h, const RVec& rho,
                    double noise) {
  double f = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double g = user_sinr(static_cast<int>(k), design, h[k], noise);
    f += std::log1p(rho[k]) - rho[k] + (1.0 + rho[k]) * g / (1.0 + g);
  }
  return f;
}

double objective_f2(const BeamformingDesign& design, const std::vector<CVec>& h, const RVec& rho,
                    const RVec& upsilon, double noise) {
  const CMat R = design.transmit_covariance();
  double f = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double signal = std::abs(h[k].dot(design.W.col(static_cast<Eigen::Index>(k))));
    const double total = real_quad(h[k], R) + noise;
    const double a = 1.0 + rho[k];
    f += std::log1p(rho[k]) - rho[k] + 2.0 * a * upsilon[k] * signal - a * upsilon[k] * upsilon[k] * total;
  }
  return f;
}

RVec update_rho(const BeamformingDesign& design, const std::vector<CVec>& h, double noise) {
  RVec rho(static_cast<Eigen::Index>(h.size()));
  for (std::size_t k = 0; k < h.size(); ++k) rho[static_cast<Eigen::Index>(k)] = user_sinr(static_cast<int>(k), design, h[k], noise);
  return rho;
}

RVec update_upsilon(const BeamformingDesign& design, const std::vector<CVec>& h, double noise) {
  const CMat R = design.transmit_covariance();
  RVec ups(static_cast<Eigen::Index>(h.size()));
  for (std::size_t k = 0; k < h.size(); ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    const double denom = real_quad(h[k], R) + noise;
    if (!(denom > 0.0)) throw NumericalError("update_upsilon: nonpositive interference-plus-noise power");
    ups[kk] = std::abs(h[k].dot(design.W.col(kk))) / denom;
  }
  return ups;
}

double state_radar_snr(const DesignProblem& problem, const DesignState& state) {
  const auto& c = problem.config;
  return radar_snr(state.design.R0, state.t.values, state.r.values, state.u0, problem.target_angle, c.wavelength,
                   c.reflection_gain, c.noise_radar);
}

double state_covert_ratio(const DesignProblem& problem, const DesignState& state) {
  const auto& c = problem.config;
  const CVec a = steering_vector(problem.target_angle, state.t.values, c.wavelength);
  return willie_powers(state.design, a, c.willie_gain, c.noise_willie).ratio();
}

// ---------------------------------------------------------------------------
// Beamforming subproblem.

SdrSubproblem build_sdr_subproblem(const DesignProblem& problem, const DesignState& state) {
  const auto& c = problem.config;
  const int N = c.num_antennas;
  const int K = problem.num_users();
  const double P = c.total_power;
  const double sigma = std::sqrt(c.noise_user);
  const Eigen::Index hd = static_cast<Eigen::Index>(N) * N;

  SdrSubproblem sdr;
  sdr.channel_scale = std::sqrt(P) / sigma;
  auto& L = sdr.layout;
  L.num_users = K;
  L.num_antennas = N;
  L.has_radar_row = has_radar(problem);
  L.has_covert_row = has_covert(problem);

  auto& cones = sdr.problem.cones;
  Eigen::Index off = 0;
  for (int k = 0; k < K; ++k) {
    L.user_block.push_back(off);
    cones.push_back(conic::Cone::hermitian_psd(N));
    off += hd;
  }
  L.radar_block = off;
  cones.push_back(conic::Cone::hermitian_psd(N));
  off += hd;
  for (int k = 0; k < K; ++k) {
    L.rate_cone.push_back(off);
    cones.push_back(conic::Cone::second_order(3));
    off += 3;
  }
  L.slack_block = off;
  const int num_slack = 1 + (L.has_radar_row ? 1 : 0) + (L.has_covert_row ? 1 : 0);
  cones.push_back(conic::Cone::nonnegative(num_slack));
  off += num_slack;
  const Eigen::Index n = off;
  const Eigen::Index m = 2 * K + num_slack;

  const std::vector<CVec> h = user_channels(problem, state.t.values);
  // The rate cones use unit-norm channels, z_k = <g^ g^^H, X_k> in [0, 1] and
  // s_k = |g^H w| / (||g|| sqrt(P)), which keeps every row of order one.
  std::vector<RVec> gg(K), gg_unit(K);
  std::vector<double> gnorm(K);
  for (int k = 0; k < K; ++k) {
    const CVec g = sdr.channel_scale * h[k];
    gnorm[k] = g.norm();
    gg[k] = conic::hvec(outer(g));
    gg_unit[k] = gnorm[k] > 0.0 ? RVec(gg[k] / (gnorm[k] * gnorm[k])) : RVec::Zero(hd);
  }

  auto& cvec = sdr.problem.c;
  cvec = RVec::Zero(n);
  RVec interference = RVec::Zero(hd);
  sdr.constant = 0.0;
  for (int k = 0; k < K; ++k) {
    const double a = 1.0 + state.rho[k];
    const double v = state.upsilon[k] * sigma;
    interference += a * v * v * gg[k];
    cvec[L.rate_cone[k] + 1] = -a * v * gnorm[k];
    sdr.constant += std::log1p(state.rho[k]) - state.rho[k] - a * v * v;
  }
  for (int k = 0; k < K; ++k) cvec.segment(L.user_block[k], hd) = interference;
  cvec.segment(L.radar_block, hd) = interference;

  auto& A = sdr.problem.A;
  auto& b = sdr.problem.b;
  A = RMat::Zero(m, n);
  b = RVec::Zero(m);
  Eigen::Index row = 0;
  // z_k + 1 and z_k - 1 entries of the rate cone.
  for (int k = 0; k < K; ++k) {
    A(row, L.rate_cone[k]) = 1.0;
    A.row(row).segment(L.user_block[k], hd) = -gg_unit[k].transpose();
    b[row++] = 1.0;
    A(row, L.rate_cone[k] + 2) = 1.0;
    A.row(row).segment(L.user_block[k], hd) = -gg_unit[k].transpose();
    b[row++] = -1.0;
  }
  Eigen::Index slack = L.slack_block;
  // Power budget.
  const RVec eye = conic::hvec(CMat::Identity(N, N));
  for (int k = 0; k < K; ++k) A.row(row).segment(L.user_block[k], hd) = eye.transpose();
  A.row(row).segment(L.radar_block, hd) = eye.transpose();
  A(row, slack++) = 1.0;
  b[row++] = 1.0;

  const CVec at = steering_vector(problem.target_angle, state.t.values, c.wavelength);
  const RVec aa = conic::hvec(outer(at));
  if (L.has_radar_row) {
    // a^H S a >= Gamma / (P c_r)
    A.row(row).segment(L.radar_block, hd) = aa.transpose();
    A(row, slack++) = -1.0;
    b[row++] = c.radar_snr_threshold / (P * radar_receive_factor(problem, state));
  }
  if (L.has_covert_row) {
    // a^H (S + sum X_k) a - kappa a^H S a <= (kappa - 1) / (P |beta|^2 / noise)
    for (int k = 0; k < K; ++k) A.row(row).segment(L.user_block[k], hd) = aa.transpose();
    A.row(row).segment(L.radar_block, hd) = (1.0 - problem.kappa) * aa.transpose();
    A(row, slack++) = 1.0;
    b[row++] = (problem.kappa - 1.0) / (willie_factor(problem) * P);
  }
  return sdr;
}

RelaxedCovariances extract_covariances(const SdrSubproblem& sdr, const RVec& x, double total_power) {
  const auto& L = sdr.layout;
  const Eigen::Index hd = static_cast<Eigen::Index>(L.num_antennas) * L.num_antennas;
  RelaxedCovariances out;
  out.total = total_power * conic::hmat(x.segment(L.radar_block, hd), L.num_antennas);
  for (int k = 0; k < L.num_users; ++k) {
    out.users.push_back(total_power * conic::hmat(x.segment(L.user_block[k], hd), L.num_antennas));
    out.total += out.users.back();
  }
  return out;
}

RVec encode_design(const SdrSubproblem& sdr, const DesignProblem& problem, const DesignState& state) {
  const auto& L = sdr.layout;
  const auto& A = sdr.problem.A;
  const double P = problem.config.total_power;
  const Eigen::Index hd = static_cast<Eigen::Index>(L.num_antennas) * L.num_antennas;
  const std::vector<CVec> h = user_channels(problem, state.t.values);
  RVec x = RVec::Zero(sdr.problem.num_vars());
  for (int k = 0; k < L.num_users; ++k) {
    const CVec w = state.design.W.col(k);
    x.segment(L.user_block[k], hd) = conic::hvec(outer(w) / P);
    const CVec g = sdr.channel_scale * h[k];
    const double gn2 = g.squaredNorm();
    const double z = gn2 > 0.0 ? std::norm(g.dot(w)) / (P * gn2) : 0.0;
    x[L.rate_cone[k]] = z + 1.0;
    x[L.rate_cone[k] + 1] = 2.0 * std::sqrt(z);
    x[L.rate_cone[k] + 2] = z - 1.0;
  }
  x.segment(L.radar_block, hd) = conic::hvec(state.design.R0 / P);
  // Each slack has a +-1 coefficient in exactly one row.
  const Eigen::Index row0 = 2 * L.num_users;
  for (Eigen::Index r = row0; r < A.rows(); ++r) {
    const Eigen::Index j = L.slack_block + (r - row0);
    const double coef = A(r, j);
    const double rest = A.row(r).dot(x) - coef * x[j];
    x[j] = (sdr.problem.b[r] - rest) / coef;
  }
  return x;
}

BeamformingDesign recover_rank_one(const CMat& total, const std::vector<CMat>& users, const std::vector<CVec>& h) {
  const Eigen::Index N = total.rows();
  const auto K = static_cast<Eigen::Index>(users.size());
  BeamformingDesign d = BeamformingDesign::zeros(static_cast<int>(N), static_cast<int>(K));
  CMat R0 = total;
  for (Eigen::Index k = 0; k < K; ++k) {
    const CVec Rh = users[k] * h[k];
    const double q = h[k].dot(Rh).real();
    const double floor = 1e-15 * std::abs(users[k].trace()) * h[k].squaredNorm();
    if (!(q > floor)) continue;
    d.W.col(k) = Rh / std::sqrt(q);
    R0 -= outer(d.W.col(k));
  }
  d.R0 = hermitian_part(R0);
  return d;
}

bool update_beamforming(const DesignProblem& problem, DesignState& state) {
  const auto& c = problem.config;
  const SdrSubproblem sdr = build_sdr_subproblem(problem, state);
  conic::SolverOptions opts;
  opts.tol = c.conic_tol;
  opts.max_iter = c.conic_max_iter;
  const conic::ConicSolution sol = conic::solve(sdr.problem, opts);
  if (sol.status != conic::SolveStatus::Optimal) {
    state.warnings.push_back("beamforming subproblem: solver status " + conic::to_string(sol.status));
    return false;
  }
  const auto cert = conic::check_certificates(sdr.problem, sol, c.conic_tol);
  if (!cert.passed()) {
    state.warnings.push_back("beamforming subproblem: certificate check failed (" + cert.failures.front() + ")");
    return false;
  }
  const auto cov = extract_covariances(sdr, sol.x, c.total_power);
  const std::vector<CVec> h = user_channels(problem, state.t.values);
  BeamformingDesign next = recover_rank_one(cov.total, cov.users, h);
  const double power = next.total_power();
  if (power > c.total_power) {
    // Uniform down-scaling keeps R0 PSD and can only lower eta1 / eta0.
    const double s = c.total_power / power;
    next.W *= std::sqrt(s);
    next.R0 *= s;
  }

  if (has_covert(problem)) {
    // The relaxation only meets the covertness row to solver accuracy; pull
    // the communication beams back so that the recovered design meets it
    // exactly and later position steps start from a feasible point.
    const CVec a = steering_vector(problem.target_angle, state.t.values, c.wavelength);
    const double f = willie_factor(problem);
    const double q0 = f * real_quad(a, next.R0);
    const double qw = f * (next.W.adjoint() * a).squaredNorm();
    const double allowed = (problem.kappa - 1.0) * (1.0 - 1e-9) * (1.0 + q0);
    if (qw > allowed && qw > 0.0) next.W *= std::sqrt(std::max(allowed, 0.0) / qw);
  }

  DesignState trial = state;
  trial.design = next;
  if (objective_f2(next, h, state.rho, state.upsilon, c.noise_user) <
      objective_f2(state.design, h, state.rho, state.upsilon, c.noise_user)) {
    return false;
  }
  if (has_radar(problem) && state_radar_snr(problem, trial) < c.radar_snr_threshold * (1.0 - 1e-7)) {
    state.warnings.push_back("beamforming subproblem: recovered design misses the radar SNR threshold");
    return false;
  }
  if (has_covert(problem) && state_covert_ratio(problem, trial) > problem.kappa * (1.0 + 1e-7)) {
    state.warnings.push_back("beamforming subproblem: recovered design exceeds the covertness ratio");
    return false;
  }
  state.design = next;
  return true;
}

// ---------------------------------------------------------------------------
// Position updates.

double radar_snr_of_t(const DesignProblem& problem, const DesignState& state, const RVec& t) {
  return radar_receive_factor(problem, state) *
         quadform_value(t, steering_pseudo_paths(problem.target_angle), state.design.R0, problem.config.wavelength);
}

RVec radar_snr_gradient(const DesignProblem& problem, const DesignState& state, const RVec& t) {
  return radar_receive_factor(problem, state) *
         quadform_gradient(t, steering_pseudo_paths(problem.target_angle), state.design.R0, problem.config.wavelength);
}

double covert_margin_of_t(const DesignProblem& problem, const DesignState& state, const RVec& t) {
  return willie_factor(problem) *
         quadform_value(t, steering_pseudo_paths(problem.target_angle), covert_form(problem, state),
                        problem.config.wavelength);
}

RVec covert_margin_gradient(const DesignProblem& problem, const DesignState& state, const RVec& t) {
  return willie_factor(problem) *
         quadform_gradient(t, steering_pseudo_paths(problem.target_angle), covert_form(problem, state),
                           problem.config.wavelength);
}

double f2_of_t(const DesignProblem& problem, const DesignState& state, const RVec& t) {
  return objective_f2(state.design, user_channels(problem, t), state.rho, state.upsilon, problem.config.noise_user);
}

RVec f2_gradient(const DesignProblem& problem, const DesignState& state, const RVec& t) {
  const double lambda = problem.config.wavelength;
  const CMat R = state.design.transmit_covariance();
  RVec grad = RVec::Zero(t.size());
  for (int k = 0; k < problem.num_users(); ++k) {
    const auto& paths = problem.users[k];
    const double a = 1.0 + state.rho[k];
    const double v = state.upsilon[k];
    const CMat Rk = outer(state.design.W.col(k));
    const double fkk = quadform_value(t, paths, Rk, lambda);
    if (fkk > 0.0 && v != 0.0) grad += a * v / std::sqrt(fkk) * quadform_gradient(t, paths, Rk, lambda);
    // sum_j grad F_kj is the gradient of the form with R_X.
    grad -= a * v * v * quadform_gradient(t, paths, R, lambda);
  }
  return grad;
}

namespace {

RMat fd_hessian(const std::function<RVec(const RVec&)>& grad, const RVec& t, double step) {
  const auto n = t.size();
  RMat H(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    RVec tp = t, tm = t;
    tp[j] += step;
    tm[j] -= step;
    H.col(j) = (grad(tp) - grad(tm)) / (2.0 * step);
  }
  return 0.5 * (H + H.transpose());
}

double spectral_norm_sym(const RMat& H) {
  if (H.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<RMat> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double validated_bound(double delta, const RMat& H, const char* name, std::vector<std::string>* warnings) {
  const double norm = spectral_norm_sym(H);
  int doublings = 0;
  while (norm > delta * (1.0 + 1e-6) + 1e-300 && doublings < 64) {
    delta = delta > 0.0 ? 2.0 * delta : norm;
    ++doublings;
  }
  if (doublings > 0 && warnings) {
    warnings->push_back(std::string(name) + " curvature bound raised after finite-difference check");
  }
  return delta;
}

}  // namespace

std::pair<double, double> compute_lipschitz_deltas(const DesignProblem& problem, const DesignState& state,
                                                   std::vector<std::string>* warnings) {
  const double lambda = problem.config.wavelength;
  const PathSet pseudo = steering_pseudo_paths(problem.target_angle);
  const RVec& t = state.t.values;
  const double step = 1e-6 * lambda;

  double d0 = radar_receive_factor(problem, state) * quadform_hessian_bound(pseudo, state.design.R0, lambda);
  d0 = validated_bound(
      d0, fd_hessian([&](const RVec& p) { return radar_snr_gradient(problem, state, p); }, t, step), "radar SNR",
      warnings);

  double d1 = 0.0;
  if (has_covert(problem)) {
    d1 = willie_factor(problem) * quadform_hessian_bound(pseudo, covert_form(problem, state), lambda);
    d1 = validated_bound(
        d1, fd_hessian([&](const RVec& p) { return covert_margin_gradient(problem, state, p); }, t, step),
        "covertness", warnings);
  }
  return {d0, d1};
}

RVec repair_positions(const RVec& p, double min_spacing, double region_length) {
  RVec q = p;
  const auto n = q.size();
  if (n == 0) return q;
  q[0] = std::max(q[0], 0.0);
  for (Eigen::Index i = 1; i < n; ++i) q[i] = std::max(q[i], q[i - 1] + min_spacing);
  if (q[n - 1] > region_length) {
    q[n - 1] = region_length;
    for (Eigen::Index i = n - 2; i >= 0; --i) q[i] = std::min(q[i], q[i + 1] - min_spacing);
  }
  return q;
}

namespace {

bool linear_feasible(const RVec& p, double d, double D) {
  AntennaPositions ap{p};
  return ap.max_violation(d, D) <= 0.0;
}

// Signed surrogate slack: lower models return value + g^T dx - c/2 |dx|^2 - threshold,
// upper models threshold - value - g^T dx - c/2 |dx|^2.
double model_slack(const QuadraticModel& q, const RVec& p, const RVec& anchor, bool lower) {
  const RVec dx = p - anchor;
  const double lin = q.value + q.gradient.dot(dx);
  const double quad = 0.5 * q.curvature * dx.squaredNorm();
  return lower ? lin - quad - q.threshold : q.threshold - lin - quad;
}

// Exact projection onto the spacing and region constraints alone: with
// u_i = t_i - i d the set is a monotone sequence inside one interval, so the
// projection is the clipped isotonic regression.
RVec project_linear(const RVec& m, double d, double D) {
  const auto n = m.size();
  std::vector<double> level;
  std::vector<Eigen::Index> count;
  for (Eigen::Index i = 0; i < n; ++i) {
    level.push_back(m[i] - static_cast<double>(i) * d);
    count.push_back(1);
    while (level.size() > 1 && level[level.size() - 2] > level.back()) {
      const auto c1 = count.back();
      const double l1 = level.back();
      level.pop_back();
      count.pop_back();
      const auto c0 = count.back();
      level.back() = (level.back() * c0 + l1 * c1) / static_cast<double>(c0 + c1);
      count.back() = c0 + c1;
    }
  }
  const double hi = D - static_cast<double>(n - 1) * d;
  RVec t(n);
  Eigen::Index i = 0;
  for (std::size_t b = 0; b < level.size(); ++b) {
    const double u = std::clamp(level[b], 0.0, hi);
    for (Eigen::Index k = 0; k < count[b]; ++k, ++i) t[i] = u + static_cast<double>(i) * d;
  }
  return t;
}

}  // namespace

std::optional<RVec> project_positions(const RVec& m, const RVec& anchor, double min_spacing, double region_length,
                                      double wavelength, const std::optional<QuadraticModel>& lower,
                                      const std::optional<QuadraticModel>& upper, double tol) {
  const auto n = m.size();
  if (linear_feasible(m, min_spacing, region_length) && (!lower || model_slack(*lower, m, anchor, true) >= 0.0) &&
      (!upper || model_slack(*upper, m, anchor, false) >= 0.0)) {
    return m;
  }

  if (!lower && !upper) return repair_positions(project_linear(m, min_spacing, region_length), min_spacing, region_length);

  // Work in wavelengths: t = lambda (T e + o), e >= 0 the spacing excess.
  const double dh = min_spacing / wavelength;
  const double Dh = region_length / wavelength;
  const RVec mh = m / wavelength;
  const RVec ah = anchor / wavelength;
  RVec o(n);
  for (Eigen::Index i = 0; i < n; ++i) o[i] = static_cast<double>(i) * dh;
  RMat T = RMat::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) T(i, j) = 1.0;

  struct ModelRows {
    RVec g;       // gradient per wavelength, normalized
    double beta;  // sqrt(curvature / 2), normalized
    double base;  // slack at the anchor, normalized
    double sign;  // +1 lower, -1 upper
  };
  std::vector<ModelRows> models;
  auto add_model = [&](const QuadraticModel& q, bool is_lower) {
    const double sign = is_lower ? 1.0 : -1.0;
    // Value-based scale; the size of the linear and quadratic terms over one
    // wavelength stands in when value and threshold are both zero.
    double scale = std::max(std::abs(q.value), std::abs(q.threshold));
    if (scale == 0.0) scale = std::max(q.gradient.norm() * wavelength, 0.5 * q.curvature * wavelength * wavelength);
    if (scale == 0.0) return;
    // Aim slightly inside the threshold so that solver round-off cannot push
    // the true constraint over it.
    const double base = (is_lower ? q.value - q.threshold : q.threshold - q.value) - 1e-8 * scale;
    ModelRows r{q.gradient * wavelength / scale, std::sqrt(0.5 * q.curvature / scale) * wavelength, base / scale,
                sign};
    if (r.beta == 0.0 && r.g.norm() == 0.0) return;
    models.push_back(r);
  };
  if (lower) add_model(*lower, true);
  if (upper) add_model(*upper, false);

  conic::ConicProblem prob;
  prob.cones.push_back(conic::Cone::nonnegative(static_cast<int>(n) + 1));  // e, xi
  // (z0, z1, v) with z0 - z1 = 1 bounds ||v||^2 <= z0 + z1; unlike (q, v) it
  // stays away from the cone apex when m is already feasible.
  prob.cones.push_back(conic::Cone::second_order(static_cast<int>(n) + 2));
  const Eigen::Index voff = n + 3;
  Eigen::Index nv = 2 * n + 3;
  std::vector<Eigen::Index> model_off;
  for (const auto& r : models) {
    model_off.push_back(nv);
    if (r.beta > 0.0) {
      prob.cones.push_back(conic::Cone::second_order(static_cast<int>(n) + 2));
      nv += n + 2;
    } else {
      prob.cones.push_back(conic::Cone::nonnegative(1));
      nv += 1;
    }
  }
  Eigen::Index rows = 2 + n;
  for (const auto& r : models) rows += r.beta > 0.0 ? n + 2 : 1;

  prob.c = RVec::Zero(nv);
  prob.c[n + 1] = 1.0;
  prob.c[n + 2] = 1.0;
  prob.A = RMat::Zero(rows, nv);
  prob.b = RVec::Zero(rows);
  Eigen::Index row = 0;
  // sum e + xi = D - (n - 1) d
  prob.A.row(row).head(n + 1).setOnes();
  prob.b[row++] = Dh - static_cast<double>(n - 1) * dh;
  prob.A(row, n + 1) = 1.0;
  prob.A(row, n + 2) = -1.0;
  prob.b[row++] = 1.0;
  // v - T e = o - m
  prob.A.block(row, voff, n, n).setIdentity();
  prob.A.block(row, 0, n, n) = -T;
  prob.b.segment(row, n) = o - mh;
  row += n;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const auto& r = models[i];
    const Eigen::Index off = model_off[i];
    // slack(tau) = base + sign g^T (T e + o - anchor)
    const RVec gT = T.transpose() * r.g;
    const double rhs = r.base + r.sign * r.g.dot(o - ah);
    if (r.beta > 0.0) {
      // (z0, z1, w): z0 - z1 = 1, z0 + z1 = slack(tau), w = beta (tau - anchor)
      prob.A(row, off) = 1.0;
      prob.A(row, off + 1) = -1.0;
      prob.b[row++] = 1.0;
      prob.A(row, off) = 1.0;
      prob.A(row, off + 1) = 1.0;
      prob.A.row(row).head(n) = -r.sign * gT.transpose();
      prob.b[row++] = rhs;
      prob.A.block(row, off + 2, n, n).setIdentity();
      prob.A.block(row, 0, n, n) = -r.beta * T;
      prob.b.segment(row, n) = r.beta * (o - ah);
      row += n;
    } else {
      prob.A(row, off) = 1.0;
      prob.A.row(row).head(n) = -r.sign * gT.transpose();
      prob.b[row++] = rhs;
    }
  }

  conic::SolverOptions opts;
  opts.tol = tol;
  const auto sol = conic::solve(prob, opts);
  if (sol.status != conic::SolveStatus::Optimal) return std::nullopt;
  const RVec e = sol.x.head(n).cwiseMax(0.0);
  return repair_positions(wavelength * (T * e + o), min_spacing, region_length);
}

namespace {

// Objective, gradient and constraint models of one position block.
struct PositionBlock {
  std::function<double(const RVec&)> value;
  std::function<RVec(const RVec&)> gradient;
  // Models around an anchor, scaled by a curvature multiplier.
  std::function<std::pair<std::optional<QuadraticModel>, std::optional<QuadraticModel>>(const RVec&, double)> models;
  // True-constraint check of a candidate against the models' thresholds.
  std::function<bool(const RVec&, const std::optional<QuadraticModel>&, const std::optional<QuadraticModel>&)>
      feasible;
};

RVec accelerated_pgd(const DesignProblem& problem, const PositionBlock& blk, const RVec& start, PgdReport& rep) {
  const auto& c = problem.config;
  RVec tl = start;
  RVec z = tl;
  double alpha = 0.1;
  double fl = blk.value(tl);
  double eta = c.line_search_initial;
  bool first = true;

  for (int it = 0; it < c.pgd_max_iter; ++it) {
    rep.iterations = it + 1;
    const RVec grad = blk.gradient(z);
    if (!grad.allFinite()) break;
    bool accepted = false;
    RVec next;
    double step = first ? c.line_search_initial : std::min(c.line_search_initial, 2.0 * eta);
    bool any_projection = false;
    for (int h = 0; h <= c.line_search_max_halvings && !accepted; ++h, step *= c.line_search_shrink) {
      const RVec m = z + step * grad;
      // A projected point that breaks the true constraints is retried with
      // doubled curvature bounds; a projection the solver cannot certify is
      // treated like a failed ascent test and the step shrinks.
      std::optional<RVec> cand;
      for (int dbl = 0; dbl <= 3; ++dbl) {
        const auto [lo, up] = blk.models(tl, std::pow(2.0, dbl));
        ++rep.projections;
        cand = project_positions(m, tl, c.min_spacing, c.region_length, c.wavelength, lo, up);
        if (!cand || blk.feasible(*cand, lo, up)) break;
        cand.reset();
      }
      if (!cand) continue;
      any_projection = true;
      if (blk.value(*cand) >= fl + c.line_search_ascent / step * (*cand - tl).squaredNorm()) {
        accepted = true;
        next = *cand;
        eta = step;
      }
    }
    if (!any_projection && (z - tl).norm() == 0.0) rep.skipped = true;
    first = false;
    if (!accepted) {
      if ((z - tl).norm() > 0.0) {
        // Extrapolated point failed; restart momentum from the last iterate.
        z = tl;
        alpha = 0.1;
        continue;
      }
      break;
    }
    ++rep.accepted;
    const double disp = (next - tl).norm();
    const double alpha_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * alpha * alpha));
    const double zeta = (alpha_next - 1.0) / alpha_next;
    z = next + zeta * (next - tl);
    alpha = alpha_next;
    tl = next;
    fl = blk.value(tl);
    if (disp < c.pgd_step_tol) break;
  }
  return tl;
}

}  // namespace

AntennaPositions pgd_update_t(const DesignProblem& problem, DesignState& state, PgdReport* report) {
  const auto& c = problem.config;
  PgdReport local;
  PgdReport& rep = report ? *report : local;

  const auto [d0, d1] = compute_lipschitz_deltas(problem, state, &state.warnings);
  const double gamma = c.radar_snr_threshold;
  const double kappa_slack = problem.kappa - 1.0;

  PositionBlock blk;
  blk.value = [&](const RVec& t) { return f2_of_t(problem, state, t); };
  blk.gradient = [&](const RVec& t) { return f2_gradient(problem, state, t); };
  blk.models = [&, d0 = d0, d1 = d1](const RVec& anchor, double mult) {
    std::optional<QuadraticModel> lo, up;
    if (has_radar(problem)) {
      const double v = radar_snr_of_t(problem, state, anchor);
      lo = QuadraticModel{v, radar_snr_gradient(problem, state, anchor), mult * d0, std::min(gamma, v)};
    }
    if (has_covert(problem)) {
      const double v = covert_margin_of_t(problem, state, anchor);
      up = QuadraticModel{v, covert_margin_gradient(problem, state, anchor), mult * d1, std::max(kappa_slack, v)};
    }
    return std::make_pair(lo, up);
  };
  // Evaluation round-off of the true constraints is tolerated at 1e-9 of the
  // budget, but never below the level already reached at the anchor.
  blk.feasible = [&](const RVec& t, const std::optional<QuadraticModel>& lo, const std::optional<QuadraticModel>& up) {
    if (lo && radar_snr_of_t(problem, state, t) < std::min(lo->threshold, gamma * (1.0 - 1e-9))) return false;
    if (up && covert_margin_of_t(problem, state, t) > std::max(up->threshold, kappa_slack + 1e-9 * problem.kappa)) {
      return false;
    }
    return true;
  };
  return AntennaPositions{accelerated_pgd(problem, blk, state.t.values, rep)};
}

std::pair<CVec, CVec> update_receive_filter(const DesignProblem& problem, const DesignState& state) {
  const auto& c = problem.config;
  const TargetGeometry geo = target_response(state.r.values, state.t.values, problem.target_angle, c.wavelength);
  const CVec ar = geo.receive_steering / std::sqrt(static_cast<double>(geo.receive_steering.size()));
  auto principal = [&](const CMat& R) -> CVec {
    const double power = real_quad(geo.transmit_steering, R);
    if (!(power > 0.0)) return ar;
    const CMat B = hermitian_part(c.reflection_gain / c.noise_radar * geo.response * R * geo.response.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> es(B);
    CVec u = es.eigenvectors().col(B.rows() - 1).normalized();
    // Fix the free phase so that u^H a_r is real and positive.
    const cdouble p = u.dot(ar);
    if (std::abs(p) > 0.0) u *= p / std::abs(p);
    return u;
  };
  return {principal(state.design.R0), principal(state.design.transmit_covariance())};
}

AntennaPositions pgd_update_r(const DesignProblem& problem, DesignState& state, PgdReport* report) {
  const auto& c = problem.config;
  PgdReport local;
  PgdReport& rep = report ? *report : local;
  const PathSet pseudo = steering_pseudo_paths(problem.target_angle);
  const CMat U = outer(state.u0);

  PositionBlock blk;
  blk.value = [&](const RVec& r) { return quadform_value(r, pseudo, U, c.wavelength); };
  blk.gradient = [&](const RVec& r) { return quadform_gradient(r, pseudo, U, c.wavelength); };
  blk.models = [](const RVec&, double) {
    return std::make_pair(std::optional<QuadraticModel>{}, std::optional<QuadraticModel>{});
  };
  blk.feasible = [](const RVec&, const std::optional<QuadraticModel>&, const std::optional<QuadraticModel>&) {
    return true;
  };
  return AntennaPositions{accelerated_pgd(problem, blk, state.r.values, rep)};
}

// ---------------------------------------------------------------------------
// Outer loop.

namespace {

TraceEntry trace_entry(const DesignProblem& problem, const DesignState& state, int iteration) {
  const auto h = user_channels(problem, state.t.values);
  TraceEntry e;
  e.iteration = iteration;
  e.f1 = sum_rate_nats(state.design, h, problem.config.noise_user);
  e.rate_bits = e.f1 / std::log(2.0);
  e.radar_snr = state_radar_snr(problem, state);
  e.covert_ratio = state_covert_ratio(problem, state);
  return e;
}

}  // namespace

DesignState initialize_state(const DesignProblem& problem) {
  const auto& c = problem.config;
  const double spacing = std::max(0.5 * c.wavelength, c.min_spacing);
  if ((c.num_antennas - 1) * spacing > c.region_length) {
    throw InfeasibleError("initialization: half-wavelength grid does not fit in the movement region");
  }
  return initialize_state(problem, AntennaPositions::centered_grid(c.num_antennas, spacing, c.region_length));
}

DesignState initialize_state(const DesignProblem& problem, const AntennaPositions& transmit) {
  const auto& c = problem.config;
  const int N = c.num_antennas;
  const int K = problem.num_users();
  if (transmit.size() != N || !transmit.feasible(c.min_spacing, c.region_length)) {
    throw InfeasibleError("initialization: transmit positions violate the array constraints");
  }
  const double spacing = std::max(0.5 * c.wavelength, c.min_spacing);
  DesignState s;
  s.t = transmit;
  s.r = AntennaPositions::centered_grid(N, spacing, c.region_length);
  const auto h = user_channels(problem, s.t.values);
  s.design = BeamformingDesign::zeros(N, K);
  const double per_user = 0.5 * c.total_power / K;
  for (int k = 0; k < K; ++k) {
    const double nh = h[k].norm();
    if (nh > 0.0) s.design.W.col(k) = std::sqrt(per_user) * h[k] / nh;
  }
  s.design.R0 = CMat::Identity(N, N) * (0.5 * c.total_power / N);
  std::tie(s.u0, s.u1) = update_receive_filter(problem, s);

  if (has_radar(problem)) {
    const double snr = state_radar_snr(problem, s);
    if (snr < c.radar_snr_threshold) {
      throw InfeasibleError("initialization violates the radar SNR constraint (SNR " + std::to_string(snr) +
                            " < threshold " + std::to_string(c.radar_snr_threshold) + ")");
    }
  }
  if (has_covert(problem) && state_covert_ratio(problem, s) > problem.kappa) {
    // eta1 / eta0 grows monotonically with a common scale on W.
    const CMat W = s.design.W;
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 100; ++i) {
      const double mid = 0.5 * (lo + hi);
      s.design.W = std::sqrt(mid) * W;
      (state_covert_ratio(problem, s) <= problem.kappa ? lo : hi) = mid;
    }
    s.design.W = std::sqrt(lo) * W;
    if (lo == 0.0) throw InfeasibleError("initialization violates the covertness constraint at any beam power");
  }
  s.rho = update_rho(s.design, h, c.noise_user);
  s.upsilon = update_upsilon(s.design, h, c.noise_user);
  s.trace.push_back(trace_entry(problem, s, 0));
  return s;
}

FeasibilityReport audit_design(const DesignProblem& problem, const DesignState& state) {
  const auto& c = problem.config;
  FeasibilityReport rep;
  rep.radar_snr = state_radar_snr(problem, state);
  rep.covert_ratio = state_covert_ratio(problem, state);
  rep.power = state.design.total_power();
  rep.min_eig_r0 = min_eigenvalue(state.design.R0);
  rep.position_violation = std::max(state.t.max_violation(c.min_spacing, c.region_length),
                                    state.r.max_violation(c.min_spacing, c.region_length));
  if (has_radar(problem) && rep.radar_snr < c.radar_snr_threshold * (1.0 - 1e-6)) rep.failures.push_back("radar SNR");
  if (has_covert(problem) && rep.covert_ratio > problem.kappa * (1.0 + 1e-6)) rep.failures.push_back("covertness ratio");
  if (rep.power > c.total_power * (1.0 + 1e-8)) rep.failures.push_back("power budget");
  if (rep.min_eig_r0 < -1e-9) rep.failures.push_back("R0 not PSD");
  if (rep.position_violation > 1e-9) rep.failures.push_back("antenna positions");
  if (state.t.size() != c.num_antennas || state.r.size() != c.num_antennas) rep.failures.push_back("antenna count");
  return rep;
}

void bcd_iteration(const DesignProblem& problem, DesignState& state) {
  const auto& c = problem.config;
  auto h = user_channels(problem, state.t.values);
  state.rho = update_rho(state.design, h, c.noise_user);
  state.upsilon = update_upsilon(state.design, h, c.noise_user);
  update_beamforming(problem, state);
  if (problem.options.optimize_transmit_positions) state.t = pgd_update_t(problem, state);
  std::tie(state.u0, state.u1) = update_receive_filter(problem, state);
  if (problem.options.optimize_receive_positions) state.r = pgd_update_r(problem, state);
}

DesignState run_bcd(const DesignProblem& problem, std::optional<DesignState> init) {
  const auto& c = problem.config;
  DesignState state = init ? std::move(*init) : initialize_state(problem);
  if (state.trace.empty()) state.trace.push_back(trace_entry(problem, state, 0));
  const int base = state.trace.back().iteration;
  state.converged = false;
  for (int it = 1; it <= c.bcd_max_iter; ++it) {
    const double prev = state.trace.back().f1;
    bcd_iteration(problem, state);
    state.trace.push_back(trace_entry(problem, state, base + it));
    const double cur = state.trace.back().f1;
    if (std::abs(cur - prev) <= c.bcd_rel_tol * std::max(std::abs(prev), 1e-300)) {
      state.converged = true;
      break;
    }
  }
  return state;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceEntry>& trace) {
  out << "iteration,f1_nats,rate_bits,radar_snr,covert_ratio\n";
  char buf[256];
  for (const auto& e : trace) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g\n", e.iteration, e.f1, e.rate_bits, e.radar_snr,
                  e.covert_ratio);
    out << buf;
  }
}

}  // namespace dfrc
