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

#include <vector>

#include "dfrc/channel.hpp"
#include "dfrc/types.hpp"

namespace dfrc {

/// Transmit beamformers (columns of W) plus the dedicated radar covariance.
struct BeamformingDesign {
  CMat W;   ///< N x K
  CMat R0;  ///< N x N, Hermitian PSD

  /// R_X^1 = W W^H + R0
  CMat transmit_covariance() const { return W * W.adjoint() + R0; }
  /// sum_k ||w_k||^2 + tr(R0)
  double total_power() const { return W.squaredNorm() + R0.trace().real(); }

  static BeamformingDesign zeros(int num_antennas, int num_users) {
    return {CMat::Zero(num_antennas, num_users), CMat::Zero(num_antennas, num_antennas)};
  }
};

/// gamma_k = |h^H w_k|^2 / (sum_{j != k} |h^H w_j|^2 + h^H R0 h + noise)
double user_sinr(int k, const BeamformingDesign& design, const CVec& h, double noise);

/// Sum over users of log2(1 + gamma_k), channels[k] = h_k.
double covert_sum_rate(const BeamformingDesign& design, const std::vector<CVec>& channels,
                       double noise);

/// |alpha|^2 u^H A R_X A^H u / (noise u^H u). Throws Error on a zero filter.
double radar_snr(const CMat& covariance, const TargetGeometry& target, const CVec& filter,
                 double reflection_gain, double noise);
double radar_snr(const CMat& covariance, const RVec& t, const RVec& r, const CVec& filter,
                 double angle, double wavelength, double reflection_gain, double noise);

/// Received power at the warden without (eta0) and with (eta1) covert signals.
struct WilliePowers {
  double eta0 = 0.0;
  double eta1 = 0.0;
  double ratio() const { return eta1 / eta0; }
};

WilliePowers willie_powers(const BeamformingDesign& design, const CVec& transmit_steering,
                           double willie_gain, double noise);

/// Smallest eigenvalue of the Hermitian part.
double min_eigenvalue(const CMat& X);

}  // namespace dfrc
