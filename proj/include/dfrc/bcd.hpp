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

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dfrc/channel.hpp"
#include "dfrc/config.hpp"
#include "dfrc/conic.hpp"
#include "dfrc/metrics.hpp"
#include "dfrc/scenario.hpp"
#include "dfrc/types.hpp"

namespace dfrc {

/// One row of the outer-loop trace. Iteration 0 is the initial point.
struct TraceEntry {
  int iteration = 0;
  double f1 = 0.0;           ///< nats
  double rate_bits = 0.0;    ///< covert sum rate, bits/s/Hz
  double radar_snr = 0.0;    ///< linear, under H0 (R0 only)
  double covert_ratio = 0.0; ///< eta1 / eta0
};

struct DesignState {
  BeamformingDesign design;
  AntennaPositions t;
  AntennaPositions r;
  CVec u0;
  CVec u1;
  RVec rho;
  RVec upsilon;  ///< real and nonnegative at the optimum
  std::vector<TraceEntry> trace;
  bool converged = false;
  std::vector<std::string> warnings;
};

/// Which blocks run_bcd updates and which constraints it enforces.
struct BcdOptions {
  bool optimize_transmit_positions = true;
  bool optimize_receive_positions = true;
  bool enforce_covertness = true;
};

/// Fixed data of one design problem: configuration, channel geometry and kappa.
struct DesignProblem {
  SystemConfig config;
  std::vector<PathSet> users;
  double target_angle = 0.0;
  double kappa = 1.0;
  BcdOptions options;

  static DesignProblem make(const SystemConfig& config, const ChannelSet& channels,
                            const BcdOptions& options = {});
  int num_users() const { return static_cast<int>(users.size()); }
  int num_antennas() const { return config.num_antennas; }
};

/// h_k(t) for every user.
std::vector<CVec> user_channels(const DesignProblem& problem, const RVec& t);

/// sum_k ln(1 + gamma_k)
double sum_rate_nats(const BeamformingDesign& design, const std::vector<CVec>& h, double noise);

/// F1 = sum_k ln(1 + rho_k) - rho_k + (1 + rho_k) gamma_k / (1 + gamma_k)
double objective_f1(const BeamformingDesign& design, const std::vector<CVec>& h, const RVec& rho,
                    double noise);

/// F2 = sum_k ln(1 + rho_k) - rho_k + 2 (1 + rho_k) upsilon_k |h_k^H w_k|
///      - (1 + rho_k) upsilon_k^2 (h_k^H R_X h_k + noise)
double objective_f2(const BeamformingDesign& design, const std::vector<CVec>& h, const RVec& rho,
                    const RVec& upsilon, double noise);

/// rho_k = gamma_k
RVec update_rho(const BeamformingDesign& design, const std::vector<CVec>& h, double noise);

/// upsilon_k = |h_k^H w_k| / (h_k^H R_X h_k + noise)
RVec update_upsilon(const BeamformingDesign& design, const std::vector<CVec>& h, double noise);

/// Radar SNR under H0 and the warden power ratio for a state.
double state_radar_snr(const DesignProblem& problem, const DesignState& state);
double state_covert_ratio(const DesignProblem& problem, const DesignState& state);

// ---------------------------------------------------------------------------
// Beamforming subproblem.

/// Variable layout of the relaxed beamforming problem. Covariances are
/// normalized by the power budget: X_k = R_k / P, S = (R - sum_k R_k) / P.
struct SdrLayout {
  int num_users = 0;
  int num_antennas = 0;
  std::vector<Eigen::Index> user_block;  ///< offset of X_k (Hermitian PSD)
  Eigen::Index radar_block = 0;          ///< offset of S (Hermitian PSD)
  std::vector<Eigen::Index> rate_cone;   ///< offset of (z_k + 1, 2 s_k, z_k - 1), z_k and s_k per unit channel norm
  Eigen::Index slack_block = 0;          ///< power, then radar, then covertness slacks
  bool has_radar_row = false;
  bool has_covert_row = false;
};

struct SdrSubproblem {
  conic::ConicProblem problem;
  SdrLayout layout;
  /// F2 = constant - c^T x at any feasible point.
  double constant = 0.0;
  /// sqrt(P) / sigma, maps h_k to the normalized channel g_k.
  double channel_scale = 1.0;
};

/// Relaxed covariances recovered from a solution vector.
struct RelaxedCovariances {
  CMat total;               ///< R~
  std::vector<CMat> users;  ///< R~_k
};

SdrSubproblem build_sdr_subproblem(const DesignProblem& problem, const DesignState& state);
RelaxedCovariances extract_covariances(const SdrSubproblem& sdr, const RVec& x,
                                       double total_power);
/// Solution vector representing a given design. Slacks are set from the
/// constraint rows, so the point is feasible exactly when the design is.
RVec encode_design(const SdrSubproblem& sdr, const DesignProblem& problem, const DesignState& state);

/// w_k = (h_k^H R~_k h_k)^{-1/2} R~_k h_k,  R0 = R~ - sum_k w_k w_k^H.
/// A user with h_k^H R~_k h_k = 0 gets w_k = 0.
BeamformingDesign recover_rank_one(const CMat& total, const std::vector<CMat>& users,
                                   const std::vector<CVec>& h);

/// Solves the relaxed problem and recovers beamformers. Keeps the current
/// design when the solver does not certify an optimum or the new design
/// would lower F2.
bool update_beamforming(const DesignProblem& problem, DesignState& state);

// ---------------------------------------------------------------------------
// Position updates.

/// SNR_0(t) = |alpha|^2 |u0^H a_r|^2 a_t(t)^H R0 a_t(t) / (noise ||u0||^2)
double radar_snr_of_t(const DesignProblem& problem, const DesignState& state, const RVec& t);
RVec radar_snr_gradient(const DesignProblem& problem, const DesignState& state, const RVec& t);

/// G(t) = (|beta|^2 / noise_w) a_t(t)^H (R_X - kappa R0) a_t(t); covertness holds iff G <= kappa - 1.
double covert_margin_of_t(const DesignProblem& problem, const DesignState& state, const RVec& t);
RVec covert_margin_gradient(const DesignProblem& problem, const DesignState& state, const RVec& t);

/// F2 as a function of the transmit positions, everything else fixed.
double f2_of_t(const DesignProblem& problem, const DesignState& state, const RVec& t);
RVec f2_gradient(const DesignProblem& problem, const DesignState& state, const RVec& t);

/// Curvature bounds delta0 (radar SNR) and delta1 (covertness form). Each is
/// checked against a finite-difference Hessian at the current t and doubled
/// until it dominates; doublings are reported through `warnings`.
std::pair<double, double> compute_lipschitz_deltas(const DesignProblem& problem, const DesignState& state,
                                                   std::vector<std::string>* warnings = nullptr);

/// Quadratic model value + g^T (t - anchor) -/+ (curvature / 2) ||t - anchor||^2.
struct QuadraticModel {
  double value = 0.0;
  RVec gradient;
  double curvature = 0.0;
  double threshold = 0.0;
};

/// Euclidean projection of m onto { ordered, spaced, inside [0, D] } intersected with
/// lower-model >= threshold and upper-model <= threshold. Returns nullopt when the
/// solver cannot certify a solution.
std::optional<RVec> project_positions(const RVec& m, const RVec& anchor, double min_spacing,
                                      double region_length, double wavelength,
                                      const std::optional<QuadraticModel>& lower,
                                      const std::optional<QuadraticModel>& upper,
                                      double tol = 1e-9);

/// Moves positions onto the linear constraint set (ordering, spacing, region).
RVec repair_positions(const RVec& p, double min_spacing, double region_length);

struct PgdReport {
  int iterations = 0;
  int accepted = 0;
  int projections = 0;
  bool skipped = false;
};

/// Accelerated projected gradient ascent of F2 over t.
AntennaPositions pgd_update_t(const DesignProblem& problem, DesignState& state, PgdReport* report = nullptr);

/// u_i = principal eigenvector of A R_X^i A^H (unit norm).
std::pair<CVec, CVec> update_receive_filter(const DesignProblem& problem, const DesignState& state);

/// Projected gradient ascent of |u0^H a_r(r)|^2 over r.
AntennaPositions pgd_update_r(const DesignProblem& problem, DesignState& state, PgdReport* report = nullptr);

// ---------------------------------------------------------------------------
// Outer loop.

/// Grids for t and r, matched-filter beams with half the power, isotropic R0
/// with the other half; beams are scaled down until covertness holds.
/// Throws InfeasibleError naming the first violated constraint.
DesignState initialize_state(const DesignProblem& problem);
/// Same, with the transmit array placed at `transmit`.
DesignState initialize_state(const DesignProblem& problem, const AntennaPositions& transmit);

struct FeasibilityReport {
  double radar_snr = 0.0;
  double covert_ratio = 0.0;
  double power = 0.0;
  double min_eig_r0 = 0.0;
  double position_violation = 0.0;
  std::vector<std::string> failures;
  bool passed() const { return failures.empty(); }
};

FeasibilityReport audit_design(const DesignProblem& problem, const DesignState& state);

/// One pass of rho, upsilon, beamforming, t, (u0, u1), r.
void bcd_iteration(const DesignProblem& problem, DesignState& state);

/// Runs BCD from `init` (or the default initialization) until the relative F1
/// change drops below the configured tolerance or the iteration cap is hit.
DesignState run_bcd(const DesignProblem& problem, std::optional<DesignState> init = std::nullopt);

void write_trace_csv(std::ostream& out, const std::vector<TraceEntry>& trace);

}  // namespace dfrc
