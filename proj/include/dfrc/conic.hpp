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
#include <string>
#include <vector>

#include "dfrc/types.hpp"

namespace dfrc::conic {

enum class ConeKind { Nonnegative, SecondOrder, SymmetricPsd, HermitianPsd };

/// One block of the product cone.
///
/// Vectorized layouts (inner products are preserved):
///  - Nonnegative(n), SecondOrder(n): n plain entries, SOC as (t, x) with ||x|| <= t.
///  - SymmetricPsd(n): n(n+1)/2 entries, lower triangle by columns, off-diagonals
///    scaled by sqrt(2).
///  - HermitianPsd(n): n^2 entries, lower triangle by columns; a diagonal entry
///    contributes its real value, an off-diagonal entry contributes
///    sqrt(2) Re, sqrt(2) Im.
struct Cone {
  ConeKind kind = ConeKind::Nonnegative;
  int size = 0;  ///< length for Nonnegative/SecondOrder, side for PSD blocks

  static Cone nonnegative(int n) { return {ConeKind::Nonnegative, n}; }
  static Cone second_order(int n) { return {ConeKind::SecondOrder, n}; }
  static Cone symmetric_psd(int side) { return {ConeKind::SymmetricPsd, side}; }
  static Cone hermitian_psd(int side) { return {ConeKind::HermitianPsd, side}; }

  int dim() const;
  /// Barrier degree: n, 1, side, side.
  int degree() const;
};

/// minimize c^T x  subject to  A x = b,  x in K = K_1 x ... x K_p.
struct ConicProblem {
  RVec c;
  RMat A;
  RVec b;
  std::vector<Cone> cones;

  int num_vars() const;
  /// Throws Error on inconsistent dimensions.
  void validate() const;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, MaxIter };
std::string to_string(SolveStatus status);

/// Primal x, dual (y, s) with A^T y + s = c. For Infeasible the pair (y, s)
/// is a Farkas certificate normalized to b^T y = 1; for Unbounded x is a ray
/// normalized to c^T x = -1.
struct ConicSolution {
  SolveStatus status = SolveStatus::MaxIter;
  RVec x;
  RVec y;
  RVec s;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double gap = 0.0;               ///< x^T s
  double primal_residual = 0.0;   ///< ||Ax - b|| / (1 + ||b||)
  double dual_residual = 0.0;     ///< ||A^T y + s - c|| / (1 + ||c||)
  int iterations = 0;
};

struct SolverOptions {
  double tol = 1e-8;
  int max_iter = 200;
  /// Mehrotra predictor-corrector; plain path following with sigma = 0.3 otherwise.
  bool predictor_corrector = true;
};

/// Homogeneous self-dual interior-point method with Nesterov-Todd scaling.
/// Dense linear algebra; intended for problems with at most a few hundred variables.
ConicSolution solve(const ConicProblem& problem, const SolverOptions& options = {});

struct CertificateReport {
  bool equality_ok = false;
  bool dual_equality_ok = false;
  bool primal_cone_ok = false;
  bool dual_cone_ok = false;
  bool gap_ok = false;
  double equality_residual = 0.0;
  double dual_residual = 0.0;
  double primal_cone_margin = 0.0;  ///< most negative cone "eigenvalue" (0 if inside)
  double dual_cone_margin = 0.0;
  double relative_gap = 0.0;
  std::vector<std::string> failures;

  bool passed() const { return failures.empty(); }
};

/// Recomputes residuals, cone membership and the duality gap from the
/// problem data alone. For Infeasible/Unbounded statuses the corresponding
/// Farkas certificate is checked instead.
CertificateReport check_certificates(const ConicProblem& problem, const ConicSolution& solution,
                                     double tol = 1e-8);

/// Smallest "eigenvalue" of a vector with respect to one cone block
/// (min entry, t - ||x||, or lambda_min). Negative means outside.
double cone_margin(const Cone& cone, const Eigen::Ref<const RVec>& segment);

RVec svec(const RMat& X);
RMat smat(const Eigen::Ref<const RVec>& v, int side);
RVec hvec(const CMat& X);
CMat hmat(const Eigen::Ref<const RVec>& v, int side);

/// Plain-text dump:
///   conic-problem v1
///   vars <n> rows <m>
///   cones <p>
///   <kind> <size>            (nonneg | soc | spsd | hpsd)
///   c <n values>
///   b <m values>
///   A <m rows of n values>
void write_problem(std::ostream& out, const ConicProblem& problem);
ConicProblem read_problem(std::istream& in);

}  // namespace dfrc::conic
