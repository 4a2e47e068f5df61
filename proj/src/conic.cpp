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

#include "dfrc/conic.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace dfrc::conic {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Block {
  Cone cone;
  Eigen::Index offset = 0;
  Eigen::Index dim = 0;
};

std::vector<Block> make_blocks(const std::vector<Cone>& cones) {
  std::vector<Block> blocks;
  Eigen::Index offset = 0;
  for (const auto& c : cones) {
    blocks.push_back({c, offset, c.dim()});
    offset += c.dim();
  }
  return blocks;
}

CMat to_matrix(const Cone& c, const Eigen::Ref<const RVec>& v) {
  if (c.kind == ConeKind::SymmetricPsd) return smat(v, c.size).cast<cdouble>();
  return hmat(v, c.size);
}

RVec to_vector(const Cone& c, const CMat& X) {
  if (c.kind == ConeKind::SymmetricPsd) return svec(X.real());
  return hvec(X);
}

double min_eig(const CMat& X) {
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (X + X.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

// Any square factor F with X = F F^H.
template <class Mat>
Mat square_factor(const Mat& X) {
  Eigen::LLT<Mat> llt(X);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Mat> es(X);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(1e-300);
  return es.eigenvectors() * ev.cwiseSqrt().asDiagonal();
}

// Nesterov-Todd scaling of one block: W x = W^{-T} s = lambda.
struct BlockScaling {
  // Nonnegative: W = diag(d).
  RVec d;
  // Second order: W = beta (2 v v^T - J).
  double beta = 1.0;
  RVec v;
  // PSD: W(U) = Q^H U Q.
  CMat Q;
  CMat Qinv;
  RVec lam_diag;
  // Scaled point, in the block's vector layout.
  RVec lambda;
};

template <class Mat>
void psd_scaling(const Mat& X, const Mat& S, BlockScaling& sc) {
  const Mat L1 = square_factor<Mat>(X);
  const Mat L2 = square_factor<Mat>(S);
  Eigen::JacobiSVD<Mat> svd(L2.adjoint() * L1, Eigen::ComputeFullU | Eigen::ComputeFullV);
  RVec lam = svd.singularValues().cwiseMax(1e-300);
  const RVec isq = lam.cwiseSqrt().cwiseInverse();
  const Mat Q = L2 * svd.matrixU() * isq.asDiagonal();
  const Mat Qinv = isq.asDiagonal() * svd.matrixV().adjoint() * L1.adjoint();
  sc.Q = Q.template cast<cdouble>();
  sc.Qinv = Qinv.template cast<cdouble>();
  sc.lam_diag = lam;
}

BlockScaling compute_scaling(const Block& blk, const Eigen::Ref<const RVec>& x, const Eigen::Ref<const RVec>& s) {
  BlockScaling sc;
  const auto n = blk.dim;
  switch (blk.cone.kind) {
    case ConeKind::Nonnegative: {
      sc.d = (s.array() / x.array()).sqrt();
      sc.lambda = (x.array() * s.array()).sqrt();
      break;
    }
    case ConeKind::SecondOrder: {
      auto jdet = [](const Eigen::Ref<const RVec>& u) {
        const double t = u.tail(u.size() - 1).norm();
        return (u[0] - t) * (u[0] + t);
      };
      const double dx = jdet(x);
      const double ds = jdet(s);
      const RVec xb = x / std::sqrt(dx);
      const RVec sb = s / std::sqrt(ds);
      const double gamma = std::sqrt(0.5 * (1.0 + xb.dot(sb)));
      RVec jx = xb;
      jx.tail(n - 1) *= -1.0;
      const RVec wb = (sb + jx) / (2.0 * gamma);
      RVec e = RVec::Zero(n);
      e[0] = 1.0;
      sc.v = (wb + e) / std::sqrt(2.0 * (wb[0] + 1.0));
      sc.beta = std::pow(ds / dx, 0.25);
      // lambda = W x
      RVec jxx = x;
      jxx.tail(n - 1) *= -1.0;
      sc.lambda = sc.beta * (2.0 * sc.v * sc.v.dot(x) - jxx);
      break;
    }
    case ConeKind::SymmetricPsd: {
      psd_scaling<RMat>(smat(x, blk.cone.size), smat(s, blk.cone.size), sc);
      sc.lambda = svec(RMat(sc.lam_diag.asDiagonal()));
      break;
    }
    case ConeKind::HermitianPsd: {
      psd_scaling<CMat>(hmat(x, blk.cone.size), hmat(s, blk.cone.size), sc);
      sc.lambda = hvec(CMat(sc.lam_diag.cast<cdouble>().asDiagonal()));
      break;
    }
  }
  return sc;
}

enum class Map { W, Winv, WT, WinvT };

RVec apply_block(const Block& blk, const BlockScaling& sc, Map map, const Eigen::Ref<const RVec>& u) {
  switch (blk.cone.kind) {
    case ConeKind::Nonnegative:
      return (map == Map::W || map == Map::WT) ? RVec(sc.d.cwiseProduct(u)) : RVec(u.cwiseQuotient(sc.d));
    case ConeKind::SecondOrder: {
      RVec ju = u;
      ju.tail(ju.size() - 1) *= -1.0;
      if (map == Map::W || map == Map::WT) {
        return sc.beta * (2.0 * sc.v * sc.v.dot(u) - ju);
      }
      RVec jv = sc.v;
      jv.tail(jv.size() - 1) *= -1.0;
      return (2.0 * jv * jv.dot(u) - ju) / sc.beta;
    }
    case ConeKind::SymmetricPsd:
    case ConeKind::HermitianPsd: {
      const CMat U = to_matrix(blk.cone, u);
      CMat R;
      switch (map) {
        case Map::W: R = sc.Q.adjoint() * U * sc.Q; break;
        case Map::WT: R = sc.Q * U * sc.Q.adjoint(); break;
        case Map::Winv: R = sc.Qinv.adjoint() * U * sc.Qinv; break;
        case Map::WinvT: R = sc.Qinv * U * sc.Qinv.adjoint(); break;
      }
      return to_vector(blk.cone, R);
    }
  }
  return u;
}

// Jordan product u o v within one block.
RVec jordan(const Block& blk, const Eigen::Ref<const RVec>& u, const Eigen::Ref<const RVec>& v) {
  switch (blk.cone.kind) {
    case ConeKind::Nonnegative:
      return u.cwiseProduct(v);
    case ConeKind::SecondOrder: {
      RVec r(u.size());
      r[0] = u.dot(v);
      r.tail(u.size() - 1) = u[0] * v.tail(v.size() - 1) + v[0] * u.tail(u.size() - 1);
      return r;
    }
    default: {
      const CMat U = to_matrix(blk.cone, u);
      const CMat V = to_matrix(blk.cone, v);
      return to_vector(blk.cone, 0.5 * (U * V + V * U));
    }
  }
}

// Solves lambda o z = r for z.
RVec jordan_divide(const Block& blk, const BlockScaling& sc, const Eigen::Ref<const RVec>& r) {
  const RVec& lam = sc.lambda;
  switch (blk.cone.kind) {
    case ConeKind::Nonnegative:
      return r.cwiseQuotient(lam);
    case ConeKind::SecondOrder: {
      const auto n = r.size();
      const double l0 = lam[0];
      const auto l1 = lam.tail(n - 1);
      const double t = l1.norm();
      const double det = (l0 - t) * (l0 + t);
      RVec z(n);
      z[0] = (l0 * r[0] - l1.dot(r.tail(n - 1))) / det;
      z.tail(n - 1) = (r.tail(n - 1) - z[0] * l1) / l0;
      return z;
    }
    default: {
      CMat R = to_matrix(blk.cone, r);
      const auto& ld = sc.lam_diag;
      for (Eigen::Index j = 0; j < R.cols(); ++j) {
        for (Eigen::Index i = 0; i < R.rows(); ++i) R(i, j) *= 2.0 / (ld[i] + ld[j]);
      }
      return to_vector(blk.cone, R);
    }
  }
}

RVec identity_block(const Block& blk) {
  switch (blk.cone.kind) {
    case ConeKind::Nonnegative:
      return RVec::Ones(blk.dim);
    case ConeKind::SecondOrder: {
      RVec e = RVec::Zero(blk.dim);
      e[0] = 1.0;
      return e;
    }
    default:
      return to_vector(blk.cone, CMat::Identity(blk.cone.size, blk.cone.size));
  }
}

// Largest alpha with lambda + alpha d inside the block (lambda interior).
double max_step_block(const Block& blk, const BlockScaling& sc, const Eigen::Ref<const RVec>& d) {
  const RVec& lam = sc.lambda;
  switch (blk.cone.kind) {
    case ConeKind::Nonnegative: {
      double a = kInf;
      for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (d[i] < 0.0) a = std::min(a, -lam[i] / d[i]);
      }
      return a;
    }
    case ConeKind::SecondOrder: {
      const auto n = d.size();
      const double t = lam.tail(n - 1).norm();
      const double c = (lam[0] - t) * (lam[0] + t);
      const double qa = d[0] * d[0] - d.tail(n - 1).squaredNorm();
      const double qb = lam[0] * d[0] - lam.tail(n - 1).dot(d.tail(n - 1));
      if (qa == 0.0) return qb < 0.0 ? -c / (2.0 * qb) : kInf;
      const double disc = qb * qb - qa * c;
      if (disc < 0.0) return kInf;
      const double q = -(qb + std::copysign(std::sqrt(disc), qb));
      double best = kInf;
      for (double root : {q / qa, q != 0.0 ? c / q : kInf}) {
        if (root > 0.0) best = std::min(best, root);
      }
      return best;
    }
    default: {
      const CMat D = to_matrix(blk.cone, d);
      const RVec isq = sc.lam_diag.cwiseSqrt().cwiseInverse();
      const CMat M = isq.asDiagonal() * D * isq.asDiagonal();
      const double mn = min_eig(M);
      return mn < 0.0 ? -1.0 / mn : kInf;
    }
  }
}

struct Scalings {
  const std::vector<Block>& blocks;
  std::vector<BlockScaling> sc;
  RVec lambda;
  // Dense W, W^{-1}, W^T, W^{-T} per block, indexed by Map; nonnegative
  // blocks keep them as diagonals.
  std::array<std::vector<RMat>, 4> dense;

  explicit Scalings(const std::vector<Block>& b) : blocks(b) {}

  RVec apply(Map map, const RVec& u) const {
    RVec out(u.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const auto& b = blocks[i];
      out.segment(b.offset, b.dim) = apply_block(b, sc[i], map, u.segment(b.offset, b.dim));
    }
    return out;
  }
  void build_dense() {
    for (int k = 0; k < 4; ++k) {
      const Map map = static_cast<Map>(k);
      auto& mats = dense[k];
      mats.resize(blocks.size());
      for (std::size_t i = 0; i < blocks.size(); ++i) {
        const auto& b = blocks[i];
        if (b.cone.kind == ConeKind::Nonnegative) {
          mats[i] = apply_block(b, sc[i], map, RVec::Ones(b.dim));
          continue;
        }
        RMat m(b.dim, b.dim);
        RVec e = RVec::Zero(b.dim);
        for (Eigen::Index j = 0; j < b.dim; ++j) {
          e[j] = 1.0;
          m.col(j) = apply_block(b, sc[i], map, e);
          e[j] = 0.0;
        }
        mats[i] = std::move(m);
      }
    }
  }
  RMat mul(Map map, const RMat& u) const {
    const auto& mats = dense[static_cast<int>(map)];
    RMat out(u.rows(), u.cols());
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const auto& b = blocks[i];
      if (b.cone.kind == ConeKind::Nonnegative) {
        out.middleRows(b.offset, b.dim) = mats[i].col(0).asDiagonal() * u.middleRows(b.offset, b.dim);
      } else {
        out.middleRows(b.offset, b.dim).noalias() = mats[i] * u.middleRows(b.offset, b.dim);
      }
    }
    return out;
  }
  RVec hinv(const RVec& u) const { return mul(Map::Winv, mul(Map::WinvT, u)); }
  RVec h(const RVec& u) const { return mul(Map::WT, mul(Map::W, u)); }
  RVec jordan_product(const RVec& u, const RVec& v) const {
    RVec out(u.size());
    for (const auto& b : blocks) out.segment(b.offset, b.dim) = jordan(b, u.segment(b.offset, b.dim), v.segment(b.offset, b.dim));
    return out;
  }
  RVec divide_lambda(const RVec& r) const {
    RVec out(r.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const auto& b = blocks[i];
      out.segment(b.offset, b.dim) = jordan_divide(b, sc[i], r.segment(b.offset, b.dim));
    }
    return out;
  }
  double max_step(const RVec& d) const {
    double a = kInf;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const auto& b = blocks[i];
      a = std::min(a, max_step_block(b, sc[i], d.segment(b.offset, b.dim)));
    }
    return a;
  }
};

RVec identity_vector(const std::vector<Block>& blocks, Eigen::Index n) {
  RVec e(n);
  for (const auto& b : blocks) e.segment(b.offset, b.dim) = identity_block(b);
  return e;
}

double scalar_step(double value, double dir) { return dir < 0.0 ? -value / dir : kInf; }

// Factorization of the normal matrix A H^{-1} A^T = B^T B with B = W^{-T} A^T.
// A QR factorization of B avoids squaring its condition number, which matters
// close to the boundary of the cones.
struct NormalSystem {
  Eigen::ColPivHouseholderQR<RMat> qr;
  Eigen::LDLT<RMat> ldlt;
  RMat R;
  bool use_qr = true;
  Eigen::Index m = 0;

  void factor(const RMat& B) {
    m = B.cols();
    if (m == 0) return;
    qr.compute(B);
    use_qr = qr.rank() == m;
    if (use_qr) {
      R = qr.matrixR().topLeftCorner(m, m).triangularView<Eigen::Upper>();
    } else {
      const RMat M = B.transpose() * B;
      const double reg = 1e-13 * std::max(1.0, M.diagonal().cwiseAbs().maxCoeff());
      ldlt.compute(M + reg * RMat::Identity(m, m));
    }
  }
  RVec solve(const RVec& r) const {
    if (m == 0) return RVec(0);
    if (!use_qr) return ldlt.solve(r);
    RVec z = qr.colsPermutation().transpose() * r;
    R.triangularView<Eigen::Upper>().transpose().solveInPlace(z);
    R.triangularView<Eigen::Upper>().solveInPlace(z);
    return qr.colsPermutation() * z;
  }
};

}  // namespace

int Cone::dim() const {
  switch (kind) {
    case ConeKind::Nonnegative:
    case ConeKind::SecondOrder: return size;
    case ConeKind::SymmetricPsd: return size * (size + 1) / 2;
    case ConeKind::HermitianPsd: return size * size;
  }
  return 0;
}

int Cone::degree() const {
  switch (kind) {
    case ConeKind::Nonnegative: return size;
    case ConeKind::SecondOrder: return 1;
    default: return size;
  }
}

int ConicProblem::num_vars() const {
  int n = 0;
  for (const auto& c : cones) n += c.dim();
  return n;
}

void ConicProblem::validate() const {
  const int n = num_vars();
  for (const auto& cone : cones) {
    if (cone.size < 1) throw Error("conic problem: cone of size < 1");
    if (cone.kind == ConeKind::SecondOrder && cone.size < 2) throw Error("conic problem: second-order cone needs size >= 2");
  }
  if (c.size() != n) throw Error("conic problem: objective length does not match cone dimensions");
  if (A.cols() != n) throw Error("conic problem: A has the wrong number of columns");
  if (A.rows() != b.size()) throw Error("conic problem: A and b disagree on the number of rows");
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::MaxIter: return "max_iter";
  }
  return "unknown";
}

RVec svec(const RMat& X) {
  const auto n = X.rows();
  RVec v(n * (n + 1) / 2);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j; i < n; ++i) v[k++] = (i == j) ? X(i, i) : kSqrt2 * 0.5 * (X(i, j) + X(j, i));
  }
  return v;
}

RMat smat(const Eigen::Ref<const RVec>& v, int side) {
  RMat X(side, side);
  Eigen::Index k = 0;
  for (int j = 0; j < side; ++j) {
    for (int i = j; i < side; ++i) {
      if (i == j) {
        X(i, i) = v[k++];
      } else {
        X(i, j) = X(j, i) = v[k++] / kSqrt2;
      }
    }
  }
  return X;
}

RVec hvec(const CMat& X) {
  const auto n = X.rows();
  RVec v(n * n);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j; i < n; ++i) {
      if (i == j) {
        v[k++] = X(i, i).real();
      } else {
        const cdouble z = 0.5 * (X(i, j) + std::conj(X(j, i)));
        v[k++] = kSqrt2 * z.real();
        v[k++] = kSqrt2 * z.imag();
      }
    }
  }
  return v;
}

CMat hmat(const Eigen::Ref<const RVec>& v, int side) {
  CMat X(side, side);
  Eigen::Index k = 0;
  for (int j = 0; j < side; ++j) {
    for (int i = j; i < side; ++i) {
      if (i == j) {
        X(i, i) = v[k++];
      } else {
        const double re = v[k++] / kSqrt2;
        const double im = v[k++] / kSqrt2;
        X(i, j) = cdouble(re, im);
        X(j, i) = cdouble(re, -im);
      }
    }
  }
  return X;
}

double cone_margin(const Cone& cone, const Eigen::Ref<const RVec>& seg) {
  switch (cone.kind) {
    case ConeKind::Nonnegative:
      return seg.minCoeff();
    case ConeKind::SecondOrder:
      return seg[0] - seg.tail(seg.size() - 1).norm();
    default:
      return min_eig(to_matrix(cone, seg));
  }
}

ConicSolution solve(const ConicProblem& problem, const SolverOptions& options) {
  problem.validate();
  const auto& A = problem.A;
  const auto& b = problem.b;
  const auto& c = problem.c;
  const Eigen::Index n = problem.num_vars();
  const Eigen::Index m = A.rows();
  const auto blocks = make_blocks(problem.cones);
  int nu = 0;
  for (const auto& cone : problem.cones) nu += cone.degree();

  const double bnorm = 1.0 + b.norm();
  const double cnorm = 1.0 + c.norm();
  // Stop slightly inside the requested tolerance so that an independent
  // recomputation of the certificates also meets it.
  const double tol = 0.5 * options.tol;

  const RVec e = identity_vector(blocks, n);
  RVec x = e;
  RVec s = e;
  RVec y = RVec::Zero(m);
  double tau = 1.0;
  double kappa = 1.0;

  ConicSolution sol;
  sol.status = SolveStatus::MaxIter;

  auto finalize_optimal = [&](int it) {
    sol.status = SolveStatus::Optimal;
    sol.x = x / tau;
    sol.y = y / tau;
    sol.s = s / tau;
    sol.iterations = it;
  };

  for (int it = 0; it <= options.max_iter; ++it) {
    const RVec rp = A * x - b * tau;
    const RVec rd = A.transpose() * y + s - c * tau;
    const double cx = c.dot(x);
    const double by = b.dot(y);
    const double rg = cx - by + kappa;

    const double pres = rp.norm() / tau / bnorm;
    const double dres = rd.norm() / tau / cnorm;
    const double pobj = cx / tau;
    const double dobj = by / tau;
    const double gap = x.dot(s) / (tau * tau);
    sol.primal_residual = pres;
    sol.dual_residual = dres;
    sol.primal_objective = pobj;
    sol.dual_objective = dobj;
    sol.gap = gap;
    sol.iterations = it;

    const double scale = 1.0 + std::abs(pobj);
    if (pres <= tol && dres <= tol && gap <= tol * scale && std::abs(pobj - dobj) <= tol * scale) {
      finalize_optimal(it);
      return sol;
    }
    if (by > 0.0) {
      const double pinf = (A.transpose() * y + s).norm() / by;
      if (pinf <= tol) {
        sol.status = SolveStatus::Infeasible;
        sol.x = RVec::Zero(n);
        sol.y = y / by;
        sol.s = s / by;
        return sol;
      }
    }
    if (cx < 0.0) {
      const double dinf = (A * x).norm() / -cx;
      if (dinf <= tol) {
        sol.status = SolveStatus::Unbounded;
        sol.x = x / -cx;
        sol.y = RVec::Zero(m);
        sol.s = RVec::Zero(n);
        return sol;
      }
    }
    if (it == options.max_iter) break;

    Scalings W(blocks);
    W.sc.reserve(blocks.size());
    W.lambda.resize(n);
    for (const auto& blk : blocks) {
      W.sc.push_back(compute_scaling(blk, x.segment(blk.offset, blk.dim), s.segment(blk.offset, blk.dim)));
      W.lambda.segment(blk.offset, blk.dim) = W.sc.back().lambda;
    }
    W.build_dense();
    const RVec& lam = W.lambda;
    const double mu = (lam.squaredNorm() + tau * kappa) / (nu + 1);

    // Normal equations A H^{-1} A^T.
    const RMat B = W.mul(Map::WinvT, A.transpose());
    const RMat HinvAt = W.mul(Map::Winv, B);
    NormalSystem ns;
    ns.factor(B);

    const RVec hinv_c = W.hinv(c);
    const RVec dy2 = ns.solve(b + A * hinv_c);
    const RVec dx2 = HinvAt * dy2 - hinv_c;
    const double denom_base = c.dot(dx2) - b.dot(dy2);

    struct Step {
      RVec dx, dy, ds, dxs, dss;  // dxs = W dx, dss = W^{-T} ds
      double dtau = 0.0, dkappa = 0.0;
    };

    // Solves
    //   A dx - b dtau = r1,  A^T dy + ds - c dtau = r2,  c^T dx - b^T dy + dkappa = r3,
    //   W dx + W^{-T} ds = r4,  kappa dtau + tau dkappa = r5.
    auto solve_kkt = [&](const RVec& r1, const RVec& r2, double r3, const RVec& r4, double r5) {
      Step st;
      const RVec wt_r4 = W.apply(Map::WT, r4);
      const RVec f1 = r2 - wt_r4;
      const RVec hinv_f1 = W.hinv(f1);
      const RVec dy1 = ns.solve(r1 + A * hinv_f1);
      const RVec dx1 = HinvAt * dy1 - hinv_f1;
      st.dtau = (r3 - r5 / tau - c.dot(dx1) + b.dot(dy1)) / (denom_base - kappa / tau);
      st.dx = dx1 + st.dtau * dx2;
      st.dy = dy1 + st.dtau * dy2;
      st.ds = wt_r4 - W.h(st.dx);
      st.dkappa = (r5 - kappa * st.dtau) / tau;
      return st;
    };

    // Newton direction for a complementarity target, with iterative refinement.
    auto newton = [&](const RVec& target_s, double target_k, double eta) {
      const RVec r1 = -eta * rp;
      const RVec r2 = -eta * rd;
      const double r3 = -eta * rg;
      const RVec r4 = W.divide_lambda(target_s);
      Step st = solve_kkt(r1, r2, r3, r4, target_k);
      for (int refine = 0; refine < 2; ++refine) {
        const RVec e1 = r1 - (A * st.dx - b * st.dtau);
        const RVec e2 = r2 - (A.transpose() * st.dy + st.ds - c * st.dtau);
        const double e3 = r3 - (c.dot(st.dx) - b.dot(st.dy) + st.dkappa);
        const RVec e4 = r4 - (W.apply(Map::W, st.dx) + W.apply(Map::WinvT, st.ds));
        const double e5 = target_k - (kappa * st.dtau + tau * st.dkappa);
        const Step corr = solve_kkt(e1, e2, e3, e4, e5);
        st.dx += corr.dx;
        st.dy += corr.dy;
        st.ds += corr.ds;
        st.dtau += corr.dtau;
        st.dkappa += corr.dkappa;
      }
      // The dual equation is linear and exact; keep it exact so that the dual
      // residual contracts even when W is badly conditioned.
      st.ds = r2 - A.transpose() * st.dy + c * st.dtau;
      st.dxs = W.apply(Map::W, st.dx);
      st.dss = W.apply(Map::WinvT, st.ds);
      return st;
    };
    auto step_length = [&](const Step& st) {
      double a = std::min(W.max_step(st.dxs), W.max_step(st.dss));
      a = std::min(a, scalar_step(tau, st.dtau));
      a = std::min(a, scalar_step(kappa, st.dkappa));
      return a;
    };

    const RVec lamlam = W.jordan_product(lam, lam);
    Step step;
    if (options.predictor_corrector) {
      const Step aff = newton(-lamlam, -tau * kappa, 1.0);
      const double alpha_aff = std::min(1.0, step_length(aff));
      const double sigma = std::pow(1.0 - alpha_aff, 3);
      const RVec corr = W.jordan_product(aff.dxs, aff.dss);
      step = newton(-lamlam - corr + sigma * mu * e, -tau * kappa - aff.dtau * aff.dkappa + sigma * mu,
                    1.0 - sigma);
    } else {
      const double sigma = 0.3;
      step = newton(-lamlam + sigma * mu * e, -tau * kappa + sigma * mu, 1.0 - sigma);
    }
    const double alpha = std::min(1.0, 0.99 * step_length(step));

    x += alpha * step.dx;
    y += alpha * step.dy;
    s += alpha * step.ds;
    tau += alpha * step.dtau;
    kappa += alpha * step.dkappa;

    if (!x.allFinite() || !s.allFinite() || !std::isfinite(tau)) break;
  }

  sol.status = SolveStatus::MaxIter;
  sol.x = x / tau;
  sol.y = y / tau;
  sol.s = s / tau;
  return sol;
}

CertificateReport check_certificates(const ConicProblem& problem, const ConicSolution& sol, double tol) {
  CertificateReport rep;
  const auto blocks = make_blocks(problem.cones);
  const auto n = problem.num_vars();
  auto margin_of = [&](const RVec& v) {
    double worst = 0.0;
    for (const auto& b : blocks) worst = std::min(worst, cone_margin(b.cone, v.segment(b.offset, b.dim)));
    return worst;
  };
  auto fail = [&rep](const std::string& what) { rep.failures.push_back(what); };

  if (sol.x.size() != n || sol.s.size() != n || sol.y.size() != problem.A.rows()) {
    fail("solution dimensions do not match the problem");
    return rep;
  }

  switch (sol.status) {
    case SolveStatus::Optimal: {
      rep.equality_residual = (problem.A * sol.x - problem.b).norm() / (1.0 + problem.b.norm());
      rep.dual_residual = (problem.A.transpose() * sol.y + sol.s - problem.c).norm() / (1.0 + problem.c.norm());
      const double pobj = problem.c.dot(sol.x);
      const double dobj = problem.b.dot(sol.y);
      rep.relative_gap = std::max(std::abs(sol.x.dot(sol.s)), std::abs(pobj - dobj)) / (1.0 + std::abs(pobj));
      rep.primal_cone_margin = margin_of(sol.x);
      rep.dual_cone_margin = margin_of(sol.s);
      rep.equality_ok = rep.equality_residual <= tol;
      rep.dual_equality_ok = rep.dual_residual <= tol;
      rep.gap_ok = rep.relative_gap <= tol;
      rep.primal_cone_ok = rep.primal_cone_margin >= -tol * (1.0 + sol.x.norm());
      rep.dual_cone_ok = rep.dual_cone_margin >= -tol * (1.0 + sol.s.norm());
      if (!rep.equality_ok) fail("primal equality residual");
      if (!rep.dual_equality_ok) fail("dual equality residual");
      if (!rep.gap_ok) fail("duality gap");
      if (!rep.primal_cone_ok) fail("primal cone membership");
      if (!rep.dual_cone_ok) fail("dual cone membership");
      break;
    }
    case SolveStatus::Infeasible: {
      // A^T y + s = 0, s in K, b^T y = 1
      rep.dual_residual = (problem.A.transpose() * sol.y + sol.s).norm();
      rep.dual_cone_margin = margin_of(sol.s);
      rep.dual_equality_ok = rep.dual_residual <= tol && std::abs(problem.b.dot(sol.y) - 1.0) <= tol;
      rep.dual_cone_ok = rep.dual_cone_margin >= -tol * (1.0 + sol.s.norm());
      rep.equality_ok = rep.primal_cone_ok = rep.gap_ok = true;
      if (!rep.dual_equality_ok) fail("infeasibility certificate residual");
      if (!rep.dual_cone_ok) fail("infeasibility certificate cone membership");
      break;
    }
    case SolveStatus::Unbounded: {
      // A x = 0, x in K, c^T x = -1
      rep.equality_residual = (problem.A * sol.x).norm();
      rep.primal_cone_margin = margin_of(sol.x);
      rep.equality_ok = rep.equality_residual <= tol && std::abs(problem.c.dot(sol.x) + 1.0) <= tol;
      rep.primal_cone_ok = rep.primal_cone_margin >= -tol * (1.0 + sol.x.norm());
      rep.dual_equality_ok = rep.dual_cone_ok = rep.gap_ok = true;
      if (!rep.equality_ok) fail("unboundedness certificate residual");
      if (!rep.primal_cone_ok) fail("unboundedness certificate cone membership");
      break;
    }
    case SolveStatus::MaxIter:
      fail("solver stopped at the iteration limit");
      break;
  }
  return rep;
}

void write_problem(std::ostream& out, const ConicProblem& p) {
  out.precision(17);
  out << "conic-problem v1\n";
  out << "vars " << p.num_vars() << " rows " << p.A.rows() << '\n';
  out << "cones " << p.cones.size() << '\n';
  for (const auto& cone : p.cones) {
    const char* name = "nonneg";
    switch (cone.kind) {
      case ConeKind::Nonnegative: name = "nonneg"; break;
      case ConeKind::SecondOrder: name = "soc"; break;
      case ConeKind::SymmetricPsd: name = "spsd"; break;
      case ConeKind::HermitianPsd: name = "hpsd"; break;
    }
    out << name << ' ' << cone.size << '\n';
  }
  out << 'c';
  for (Eigen::Index i = 0; i < p.c.size(); ++i) out << ' ' << p.c[i];
  out << "\nb";
  for (Eigen::Index i = 0; i < p.b.size(); ++i) out << ' ' << p.b[i];
  out << "\nA\n";
  for (Eigen::Index i = 0; i < p.A.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.A.cols(); ++j) out << (j ? " " : "") << p.A(i, j);
    out << '\n';
  }
}

ConicProblem read_problem(std::istream& in) {
  auto expect = [&in](const std::string& word) {
    std::string tok;
    if (!(in >> tok) || tok != word) throw Error("read_problem: expected '" + word + "'");
  };
  expect("conic-problem");
  expect("v1");
  int n = 0, m = 0;
  std::size_t p = 0;
  expect("vars");
  in >> n;
  expect("rows");
  in >> m;
  expect("cones");
  in >> p;
  if (!in || n < 0 || m < 0) throw Error("read_problem: malformed header");
  ConicProblem prob;
  for (std::size_t i = 0; i < p; ++i) {
    std::string kind;
    int size = 0;
    in >> kind >> size;
    if (kind == "nonneg") prob.cones.push_back(Cone::nonnegative(size));
    else if (kind == "soc") prob.cones.push_back(Cone::second_order(size));
    else if (kind == "spsd") prob.cones.push_back(Cone::symmetric_psd(size));
    else if (kind == "hpsd") prob.cones.push_back(Cone::hermitian_psd(size));
    else throw Error("read_problem: unknown cone kind '" + kind + "'");
  }
  prob.c.resize(n);
  prob.b.resize(m);
  prob.A.resize(m, n);
  expect("c");
  for (int i = 0; i < n; ++i) in >> prob.c[i];
  expect("b");
  for (int i = 0; i < m; ++i) in >> prob.b[i];
  expect("A");
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) in >> prob.A(i, j);
  if (!in) throw Error("read_problem: truncated data");
  prob.validate();
  return prob;
}

}  // namespace dfrc::conic
