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

#include "dfrc/types.hpp"

namespace dfrc {

/// Ordered antenna positions along the 1-D movement region (metres).
struct AntennaPositions {
  RVec values;

  int size() const { return static_cast<int>(values.size()); }

  /// Largest violation of 0 <= p_1, p_N <= D, p_n - p_{n-1} >= d (0 when feasible).
  double max_violation(double min_spacing, double region_length) const;
  bool feasible(double min_spacing, double region_length, double tol = 1e-9) const {
    return max_violation(min_spacing, region_length) <= tol;
  }

  /// n positions spaced by `spacing`, centred in [0, region_length].
  static AntennaPositions centered_grid(int n, double spacing, double region_length);
};

/// Path angles and complex path gains of one link (the PRM diagonal).
struct PathSet {
  RVec angles;
  CVec gains;
};

/// Single-path pseudo-channel whose channel vector equals the target steering
/// vector a(phi, p), so a^H M a can reuse the multipath quadratic-form machinery.
PathSet steering_pseudo_paths(double target_angle);

/// p cos(psi)
double propagation_diff(double position, double angle);

/// [exp(j 2pi/lambda rho(p, psi_j))]_j
CVec field_response_vector(double position, const RVec& angles, double wavelength);

/// L x N, column n is the field response vector at positions[n].
CMat field_response_matrix(const RVec& positions, const RVec& angles, double wavelength);

/// h with h^H = 1^H Sigma G(p).
CVec channel_vector(const RVec& positions, const PathSet& paths, double wavelength);

/// One user's channel with its cached field response matrix.
struct UserChannel {
  int user = 0;
  CVec h;
  CMat frm;
};
UserChannel make_user_channel(int user, const RVec& positions, const PathSet& paths, double wavelength);

/// [exp(j 2pi/lambda p_n cos(phi))]_n
CVec steering_vector(double angle, const RVec& positions, double wavelength);

struct TargetGeometry {
  double angle = 0.0;
  CVec transmit_steering;  ///< a_t(phi, t)
  CVec receive_steering;   ///< a_r(phi, r)
  CMat response;           ///< A = a_r a_t^H
};

TargetGeometry target_response(const RVec& r, const RVec& t, double angle, double wavelength);

/// h^H M h with h the channel vector of `paths` at `positions`.
double quadform_value(const RVec& positions, const PathSet& paths, const CMat& M, double wavelength);

/// Gradient of a^H G(p) M G(p)^H a (a = Sigma^H 1) with respect to the
/// positions, from the sine expansion of the cosine series
///
///   F(p) = sum_{n,m,l,q} |M_nm||a_l||a_q| cos(angle(M_nm) - angle(a_l) + angle(a_q)
///                                         + k p_n cos psi_l - k p_m cos psi_q),
///
/// with k = 2pi/lambda. Throws Error when M is not Hermitian.
RVec quadform_gradient(const RVec& positions, const PathSet& paths, const CMat& M, double wavelength);

/// Upper bound on the spectral norm of the Hessian of the same quadratic form,
/// valid for every position vector: each cosine term contributes
/// |M_nm||a_l||a_q| ||grad phase||^2.
double quadform_hessian_bound(const PathSet& paths, const CMat& M, double wavelength);

/// Throws Error when M is not Hermitian to a relative 1e-10.
void require_hermitian(const CMat& M, const char* what);

}  // namespace dfrc
