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

// Shared helpers for the unit tests.

#pragma once

#include <random>

#include "dfrc/types.hpp"

namespace dfrc::testing {

inline CVec random_cvec(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g;
  CVec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = cdouble(g(rng), g(rng));
  return v;
}

inline RVec random_rvec(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g;
  RVec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

/// Random Hermitian PSD matrix of the given rank.
inline CMat random_psd(std::mt19937_64& rng, Eigen::Index n, Eigen::Index rank) {
  CMat G(n, rank);
  for (Eigen::Index j = 0; j < rank; ++j) G.col(j) = random_cvec(rng, n);
  return G * G.adjoint();
}

inline double rel_err(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

}  // namespace dfrc::testing
