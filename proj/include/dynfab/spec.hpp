// Copyright 2026 The dynfab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DYNFAB_SPEC_HPP_
#define DYNFAB_SPEC_HPP_

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "dynfab/core.hpp"
#include "dynfab/diffgeo.hpp"

namespace dynfab {

// Second-order system M xddot + f = 0 on an m-dimensional space.
class Spec {
 public:
  Spec() = default;

  Spec(Matrix M, Vector f) : M_(std::move(M)), f_(std::move(f)) {
    if (M_.rows() != M_.cols()) throw ContractError("spec: M must be square");
    detail::RequireDim(f_.size(), M_.rows(), "spec force");
    detail::RequireFinite(M_, "spec metric");
    detail::RequireFinite(f_, "spec force");
    if (M_.size() > 0 &&
        (M_ - M_.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
      throw ContractError("spec: metric is not symmetric");
    }
  }

  static Spec Zero(int m) { return Spec(Matrix::Zero(m, m), Vector::Zero(m)); }

  const Matrix& M() const { return M_; }
  const Vector& f() const { return f_; }
  int space_dim() const { return static_cast<int>(f_.size()); }

 private:
  Matrix M_;
  Vector f_;
};

inline Spec sum(const Spec& a, const Spec& b) {
  detail::RequireDim(b.space_dim(), a.space_dim(), "spec sum");
  return Spec(a.M() + b.M(), a.f() + b.f());
}

inline Spec operator+(const Spec& a, const Spec& b) { return sum(a, b); }

// (J^T M J, J^T (f + M Jdot qdot)).
inline Spec pull(const Spec& spec, const JetEvaluation& jet) {
  detail::RequireDim(spec.space_dim(), jet.m(), "pull");
  const Matrix MJ = spec.M() * jet.J;
  Matrix pulled = jet.J.transpose() * MJ;
  pulled = 0.5 * (pulled + pulled.transpose()).eval();
  return Spec(std::move(pulled),
              jet.J.transpose() * (spec.f() + spec.M() * jet.Jdot_qdot));
}

// Forced variant (M, f + grad psi).
inline Spec force(const Spec& spec, const Vector& grad_psi) {
  detail::RequireDim(grad_psi.size(), spec.space_dim(), "force");
  detail::RequireFinite(grad_psi, "forcing gradient");
  return Spec(spec.M(), spec.f() + grad_psi);
}

// Condition number above which a metric is treated as singular.
inline constexpr double kMaxCondition = 1e12;

// xddot = -M^{-1} f via a symmetric factorization, falling back to a fully
// pivoted LU when the metric is indefinite.
inline Vector solve(const Spec& spec) {
  const Matrix& M = spec.M();
  const Eigen::Index m = M.rows();
  if (m == 0) return Vector();
  // LDLT pseudo-inverts zero pivots, so semidefinite metrics go to the LU.
  Eigen::LDLT<Matrix> ldlt(M);
  if (ldlt.info() == Eigen::Success && ldlt.vectorD().minCoeff() > 0.0) {
    const double rcond = ldlt.rcond();
    const double cond = rcond > 0.0 ? 1.0 / rcond
                                    : std::numeric_limits<double>::infinity();
    if (cond > kMaxCondition) {
      throw SolveError("solve: ill-conditioned metric", cond);
    }
    Vector xddot = ldlt.solve(-spec.f());
    if (xddot.allFinite()) return xddot;
  }
  Eigen::FullPivLU<Matrix> lu(M);
  const double rcond = lu.isInvertible() ? lu.rcond() : 0.0;
  const double cond =
      rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  if (cond > kMaxCondition) {
    throw SolveError("solve: singular metric", cond);
  }
  return lu.solve(-spec.f());
}

}  // namespace dynfab

#endif  // DYNFAB_SPEC_HPP_
