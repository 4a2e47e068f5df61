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

#include "dfrc/channel.hpp"

#include <algorithm>
#include <cmath>

namespace dfrc {

double AntennaPositions::max_violation(double min_spacing, double region_length) const {
  if (values.size() == 0) return 0.0;
  double worst = std::max(0.0, -values[0]);
  worst = std::max(worst, values[values.size() - 1] - region_length);
  for (Eigen::Index n = 1; n < values.size(); ++n) {
    worst = std::max(worst, min_spacing - (values[n] - values[n - 1]));
  }
  return worst;
}

AntennaPositions AntennaPositions::centered_grid(int n, double spacing, double region_length) {
  AntennaPositions p;
  p.values.resize(n);
  const double start = 0.5 * (region_length - (n - 1) * spacing);
  for (int i = 0; i < n; ++i) p.values[i] = start + i * spacing;
  return p;
}

PathSet steering_pseudo_paths(double target_angle) {
  // cos(pi - phi) = -cos(phi) flips the FRV phase so that h = G^H 1 = a(phi).
  PathSet paths;
  paths.angles = RVec::Constant(1, kPi - target_angle);
  paths.gains = CVec::Ones(1);
  return paths;
}

double propagation_diff(double position, double angle) { return position * std::cos(angle); }

CVec field_response_vector(double position, const RVec& angles, double wavelength) {
  const double k = 2.0 * kPi / wavelength;
  CVec g(angles.size());
  for (Eigen::Index j = 0; j < angles.size(); ++j) {
    g[j] = std::polar(1.0, k * propagation_diff(position, angles[j]));
  }
  return g;
}

CMat field_response_matrix(const RVec& positions, const RVec& angles, double wavelength) {
  CMat G(angles.size(), positions.size());
  for (Eigen::Index n = 0; n < positions.size(); ++n) {
    G.col(n) = field_response_vector(positions[n], angles, wavelength);
  }
  return G;
}

CVec channel_vector(const RVec& positions, const PathSet& paths, double wavelength) {
  // h = G^H Sigma^H 1
  const CMat G = field_response_matrix(positions, paths.angles, wavelength);
  return G.adjoint() * paths.gains.conjugate();
}

UserChannel make_user_channel(int user, const RVec& positions, const PathSet& paths, double wavelength) {
  UserChannel ch;
  ch.user = user;
  ch.frm = field_response_matrix(positions, paths.angles, wavelength);
  ch.h = ch.frm.adjoint() * paths.gains.conjugate();
  return ch;
}

CVec steering_vector(double angle, const RVec& positions, double wavelength) {
  const double k = 2.0 * kPi / wavelength;
  CVec a(positions.size());
  for (Eigen::Index n = 0; n < positions.size(); ++n) {
    a[n] = std::polar(1.0, k * propagation_diff(positions[n], angle));
  }
  return a;
}

TargetGeometry target_response(const RVec& r, const RVec& t, double angle, double wavelength) {
  TargetGeometry g;
  g.angle = angle;
  g.transmit_steering = steering_vector(angle, t, wavelength);
  g.receive_steering = steering_vector(angle, r, wavelength);
  g.response = g.receive_steering * g.transmit_steering.adjoint();
  return g;
}

void require_hermitian(const CMat& M, const char* what) {
  if (M.rows() != M.cols()) throw Error(std::string(what) + ": matrix is not square");
  const double asym = (M - M.adjoint()).norm();
  if (asym > 1e-10 * (1.0 + M.norm())) {
    throw Error(std::string(what) + ": matrix is not Hermitian");
  }
}

double quadform_value(const RVec& positions, const PathSet& paths, const CMat& M, double wavelength) {
  const CVec h = channel_vector(positions, paths, wavelength);
  return (h.adjoint() * M * h)(0, 0).real();
}

RVec quadform_gradient(const RVec& positions, const PathSet& paths, const CMat& M, double wavelength) {
  require_hermitian(M, "quadform_gradient");
  const Eigen::Index N = positions.size();
  const Eigen::Index L = paths.angles.size();
  if (M.rows() != N) throw Error("quadform_gradient: matrix size does not match the number of antennas");
  const double k = 2.0 * kPi / wavelength;

  // a = Sigma^H 1
  const CVec a = paths.gains.conjugate();
  RVec mag(L), arg(L), cosang(L);
  for (Eigen::Index l = 0; l < L; ++l) {
    mag[l] = std::abs(a[l]);
    arg[l] = std::arg(a[l]);
    cosang[l] = std::cos(paths.angles[l]);
  }
  // Phase of each (n, m, l, q) term:
  //   arg M_nm - arg a_l + k p_n cos psi_l + arg a_q - k p_m cos psi_q
  auto phase = [&](Eigen::Index n, Eigen::Index m, Eigen::Index l, Eigen::Index q) {
    return std::arg(M(n, m)) - arg[l] + k * positions[n] * cosang[l] + arg[q] - k * positions[m] * cosang[q];
  };

  RVec grad = RVec::Zero(N);
  for (Eigen::Index n = 0; n < N; ++n) {
    double g = 0.0;
    // Same antenna, distinct paths.
    const double mnn = std::abs(M(n, n));
    for (Eigen::Index l = 0; l + 1 < L; ++l) {
      for (Eigen::Index q = l + 1; q < L; ++q) {
        const double mu = mnn * mag[l] * mag[q];
        g -= 2.0 * k * mu * std::sin(phase(n, n, l, q)) * (cosang[l] - cosang[q]);
      }
    }
    // p_n appears as the first index.
    for (Eigen::Index m = n + 1; m < N; ++m) {
      const double mnm = std::abs(M(n, m));
      if (mnm == 0.0) continue;
      for (Eigen::Index l = 0; l < L; ++l) {
        for (Eigen::Index q = 0; q < L; ++q) {
          const double mu = mnm * mag[l] * mag[q];
          g -= 2.0 * k * mu * std::sin(phase(n, m, l, q)) * cosang[l];
        }
      }
    }
    // p_n appears as the second index.
    for (Eigen::Index m = 0; m < n; ++m) {
      const double mmn = std::abs(M(m, n));
      if (mmn == 0.0) continue;
      for (Eigen::Index l = 0; l < L; ++l) {
        for (Eigen::Index q = 0; q < L; ++q) {
          const double mu = mmn * mag[l] * mag[q];
          g += 2.0 * k * mu * std::sin(phase(m, n, l, q)) * cosang[q];
        }
      }
    }
    grad[n] = g;
  }
  return grad;
}

double quadform_hessian_bound(const PathSet& paths, const CMat& M, double wavelength) {
  const Eigen::Index N = M.rows();
  const Eigen::Index L = paths.angles.size();
  const double k = 2.0 * kPi / wavelength;
  RVec mag(L), cosang(L);
  for (Eigen::Index l = 0; l < L; ++l) {
    mag[l] = std::abs(paths.gains[l]);
    cosang[l] = std::cos(paths.angles[l]);
  }
  double same = 0.0;   // sum_{l,q} |a_l||a_q| (c_l - c_q)^2
  double cross = 0.0;  // sum_{l,q} |a_l||a_q| (c_l^2 + c_q^2)
  for (Eigen::Index l = 0; l < L; ++l) {
    for (Eigen::Index q = 0; q < L; ++q) {
      const double w = mag[l] * mag[q];
      same += w * (cosang[l] - cosang[q]) * (cosang[l] - cosang[q]);
      cross += w * (cosang[l] * cosang[l] + cosang[q] * cosang[q]);
    }
  }
  double bound = 0.0;
  for (Eigen::Index n = 0; n < N; ++n) {
    for (Eigen::Index m = 0; m < N; ++m) {
      bound += std::abs(M(n, m)) * (n == m ? same : cross);
    }
  }
  return k * k * bound;
}

}  // namespace dfrc
