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

#include "dfrc/metrics.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace dfrc {

double user_sinr(int k, const BeamformingDesign& design, const CVec& h, double noise) {
  const CVec hw = design.W.adjoint() * h;  // conj(h^H w_j)
  const double signal = std::norm(hw[k]);
  const double interference = hw.squaredNorm() - signal;
  const double radar = (h.adjoint() * design.R0 * h)(0, 0).real();
  return signal / (interference + radar + noise);
}

double covert_sum_rate(const BeamformingDesign& design, const std::vector<CVec>& channels, double noise) {
  double rate = 0.0;
  for (std::size_t k = 0; k < channels.size(); ++k) {
    rate += std::log2(1.0 + user_sinr(static_cast<int>(k), design, channels[k], noise));
  }
  return rate;
}

double radar_snr(const CMat& covariance, const TargetGeometry& target, const CVec& filter,
                 double reflection_gain, double noise) {
  const double uu = filter.squaredNorm();
  if (uu == 0.0) throw Error("radar_snr: receive filter is zero");
  const CVec v = target.response.adjoint() * filter;  // A^H u
  const double num = (v.adjoint() * covariance * v)(0, 0).real();
  return reflection_gain * num / (noise * uu);
}

double radar_snr(const CMat& covariance, const RVec& t, const RVec& r, const CVec& filter, double angle,
                 double wavelength, double reflection_gain, double noise) {
  return radar_snr(covariance, target_response(r, t, angle, wavelength), filter, reflection_gain, noise);
}

WilliePowers willie_powers(const BeamformingDesign& design, const CVec& a, double willie_gain, double noise) {
  WilliePowers p;
  const double radar = (a.adjoint() * design.R0 * a)(0, 0).real();
  const double comm = (design.W.adjoint() * a).squaredNorm();
  p.eta0 = willie_gain * radar + noise;
  p.eta1 = p.eta0 + willie_gain * comm;
  return p;
}

double min_eigenvalue(const CMat& X) {
  if (X.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(X), Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

}  // namespace dfrc
