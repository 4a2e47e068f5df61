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

#include "dfrc/validate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "dfrc/baselines.hpp"
#include "dfrc/covertness.hpp"
#include "dfrc/scenario.hpp"

namespace dfrc {

namespace {

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

// Worst relative error of an analytic gradient against central differences.
double gradient_error(const std::function<double(const RVec&)>& f, const RVec& g, const RVec& t, double h) {
  double worst = 0.0;
  const double scale = std::max(g.lpNorm<Eigen::Infinity>(), 1e-300);
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    RVec p = t, m = t;
    p[i] += h;
    m[i] -= h;
    const double fd = (f(p) - f(m)) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - g[i]) / scale);
  }
  return worst;
}

}  // namespace

std::vector<CheckResult> validate_config(const SystemConfig& config, int seeds) {
  std::vector<CheckResult> out;
  auto add = [&](std::string name, bool ok, std::string detail) {
    out.push_back({std::move(name), ok, std::move(detail)});
  };

  try {
    config.validate();
    add("config", true, "");
  } catch (const Error& e) {
    add("config", false, e.what());
    return out;
  }

  const double kappa = covertness_ratio_bound(config);
  {
    const double x = kappa;
    const double target = config.kappa_mode == KappaMode::PerSample
                              ? 2.0 * config.covertness_level * config.covertness_level / config.detection_samples
                              : 2.0 * config.covertness_level * config.covertness_level;
    const double residual = std::abs(std::log(x) + 1.0 / x - 1.0 - target);
    add("kappa root", residual < 1e-12 && kappa >= 1.0, fmt("kappa %.15g residual %.3g", kappa, residual));
  }
  {
    // At eta1 / eta0 = kappa the KL bound, and hence the exact DEP, must clear 1 - eps.
    const int M = config.detection_samples;
    const double kl = kl_divergence(1.0, kappa, M);
    const double pinsker = dep_pinsker_bound(kl);
    const double exact = kappa > 1.0 ? min_dep_exact(1.0, kappa, M) : 1.0;
    const bool ok = exact + 1e-9 >= pinsker &&
                    (config.kappa_mode == KappaMode::Unscaled || pinsker >= 1.0 - config.covertness_level - 1e-9);
    add("covertness guarantee", ok, fmt("pinsker %.9f exact %.9f", pinsker, exact));
  }

  for (int i = 0; i < seeds; ++i) {
    const std::uint64_t seed = config.rng_seed + static_cast<std::uint64_t>(i);
    const std::string tag = "seed " + std::to_string(seed) + ": ";
    try {
      const ChannelSet channels = sample_scenario(config, seed);
      const DesignProblem problem = DesignProblem::make(config, channels);
      const DesignState state = run_bcd(problem);
      const FeasibilityReport audit = audit_design(problem, state);
      std::string why;
      for (const auto& f : audit.failures) why += (why.empty() ? "" : "; ") + f;
      add(tag + "feasibility audit", audit.passed(), why);

      double worst = 0.0;
      for (std::size_t k = 1; k < state.trace.size(); ++k) {
        worst = std::max(worst, state.trace[k - 1].f1 - state.trace[k].f1);
      }
      add(tag + "monotone trace", worst <= 1e-6, fmt("largest drop %.3g over %.0f iterations", worst,
                                                     static_cast<double>(state.trace.size()) - 1.0));

      const std::vector<CVec> h = user_channels(problem, state.t.values);
      const double noise = config.noise_user;
      const RVec rho = update_rho(state.design, h, noise);
      const double f1 = objective_f1(state.design, h, rho, noise);
      const double rate = sum_rate_nats(state.design, h, noise);
      add(tag + "surrogate tight at rho = gamma", rel(f1, rate) < 1e-10, fmt("F1 %.12g rate %.12g", f1, rate));

      const double snr = state_radar_snr(problem, state);
      const CVec at = steering_vector(problem.target_angle, state.t.values, config.wavelength);
      const double closed = config.reflection_gain * config.num_antennas *
                            (at.adjoint() * state.design.R0 * at)(0).real() / config.noise_radar;
      add(tag + "radar snr factorization", rel(snr, closed) < 1e-9, fmt("measured %.12g closed %.12g", snr, closed));

      DesignState probe = state;
      probe.rho = rho;
      probe.upsilon = update_upsilon(state.design, h, noise);
      const SdrSubproblem sdr = build_sdr_subproblem(problem, probe);
      conic::SolverOptions opts;
      opts.tol = config.conic_tol;
      opts.max_iter = config.conic_max_iter;
      const conic::ConicSolution sol = conic::solve(sdr.problem, opts);
      const conic::CertificateReport cert = conic::check_certificates(sdr.problem, sol, 1e-6);
      add(tag + "solver certificate", sol.status == conic::SolveStatus::Optimal && cert.passed(),
          conic::to_string(sol.status));
      if (sol.status == conic::SolveStatus::Optimal) {
        const RelaxedCovariances cov = extract_covariances(sdr, sol.x, config.total_power);
        const BeamformingDesign rec = recover_rank_one(cov.total, cov.users, h);
        const double relaxed = sdr.constant - sdr.problem.c.dot(sol.x);
        const double recovered = objective_f2(rec, h, probe.rho, probe.upsilon, noise);
        add(tag + "rank-one recovery", rel(relaxed, recovered) < 1e-6 && min_eigenvalue(rec.R0) >= -1e-9,
            fmt("relaxed %.12g recovered %.12g", relaxed, recovered));
      }

      const RVec& t = state.t.values;
      const double step = 1e-6 * config.wavelength;
      double g = gradient_error([&](const RVec& p) { return f2_of_t(problem, probe, p); },
                                f2_gradient(problem, probe, t), t, step);
      g = std::max(g, gradient_error([&](const RVec& p) { return radar_snr_of_t(problem, state, p); },
                                     radar_snr_gradient(problem, state, t), t, step));
      g = std::max(g, gradient_error([&](const RVec& p) { return covert_margin_of_t(problem, state, p); },
                                     covert_margin_gradient(problem, state, t), t, step));
      add(tag + "position gradients", g < 1e-5, fmt("worst relative error %.3g", g));
    } catch (const Error& e) {
      add(tag + "solve", false, e.what());
    }
  }
  return out;
}

}  // namespace dfrc
