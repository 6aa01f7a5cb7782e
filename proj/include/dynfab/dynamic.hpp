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

// Fabrics relative to a moving reference: relative coordinates, the dynamic
// pullback and energization that conserves the energy measured relative to
// the reference.

#ifndef DYNFAB_DYNAMIC_HPP_
#define DYNFAB_DYNAMIC_HPP_

#include <functional>
#include <memory>
#include <string>
#include <utility>

#include "dynfab/core.hpp"
#include "dynfab/diffgeo.hpp"
#include "dynfab/energy.hpp"
#include "dynfab/reference.hpp"
#include "dynfab/spec.hpp"

namespace dynfab {

struct RelativeState {
  Vector x_rel;
  Vector x_rel_dot;
};

inline RelativeState relative_state(const Vector& x, const Vector& xdot,
                                    const ReferenceTrajectory& ref, double t) {
  detail::RequireDim(x.size(), ref.dim(), "relative_state");
  detail::RequireDim(xdot.size(), ref.dim(), "relative_state");
  const ReferenceSample s = ref(t);
  return {x - s.x, xdot - s.xdot};
}

// Maps a spec written in coordinates relative to the reference back into the
// fixed frame: (M, f - M xddot_ref).
inline Spec dynamic_pull(const Spec& spec_rel, const Vector& ref_accel) {
  detail::RequireDim(ref_accel.size(), spec_rel.space_dim(), "dynamic_pull");
  return Spec(spec_rel.M(), spec_rel.f() - spec_rel.M() * ref_accel);
}

// Moore-Penrose pseudo-inverse; singular values below 1e-8 sigma_max are
// treated as zero.
inline Matrix pseudo_inverse(const Matrix& A) {
  if (A.size() == 0) return Matrix::Zero(A.cols(), A.rows());
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  const double cutoff = 1e-8 * (sigma.size() > 0 ? sigma[0] : 0.0);
  Vector inv = Vector::Zero(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma[i] > cutoff && sigma[i] > 0.0) inv[i] = 1.0 / sigma[i];
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

struct DynamicEnergizedSpec {
  Spec spec;
  double alpha = 0.0;
  bool degenerate = false;
  // Set by the pulled variant when J^T M J is rank deficient. The pulled
  // energization never inverts that matrix, so the result stays valid.
  bool rank_deficient = false;
};

// Energizes the fixed-frame geometry xddot + h(x, xdot) = 0 with a Lagrangian
// defined on relative coordinates. The result is the fixed-frame system
//   xddot + h + alpha xdot_rel = 0,
//   alpha = -(xdot_rel^T M xdot_rel)^{-1} xdot_rel^T (M (h + xddot_ref) - f),
// returned as the spec (M, M (h + alpha xdot_rel)).
inline DynamicEnergizedSpec dynamic_energize(const Lagrangian& lag_rel,
                                             const Geometry& geom,
                                             const Vector& x,
                                             const Vector& xdot,
                                             const ReferenceTrajectory& ref,
                                             double t) {
  detail::RequireDim(geom.dim(), lag_rel.dim(), "dynamic_energize");
  detail::RequireDim(ref.dim(), lag_rel.dim(), "dynamic_energize reference");
  const ReferenceSample s = ref(t);
  const Vector x_rel = x - s.x;
  const Vector v_rel = xdot - s.xdot;
  const LagrangianTerms terms = lag_rel.eval(x_rel, v_rel);
  const Vector h = geom(x, xdot);
  const Vector Mh = terms.M * h;
  const Vector Mv = terms.M * v_rel;
  const double denom = v_rel.dot(Mv);
  if (!(denom > kDegenerateEnergy)) {
    return {Spec(terms.M, Mh), 0.0, true, false};
  }
  const double alpha =
      -v_rel.dot(Mh + terms.M * s.xddot - terms.f) / denom;
  return {Spec(terms.M, Mh + alpha * Mv), alpha, false, false};
}

// Pull-then-energize counterpart of dynamic_energize followed by pull(.., jet):
// the geometry and the relative Lagrangian are pulled into Q and energized
// there with the pulled reference velocity qdot_ref = J^+ xdot_ref.
inline DynamicEnergizedSpec pulled_dynamic_energize(
    const Lagrangian& lag_rel, const Geometry& geom,
    const ReferenceTrajectory& ref, double t, const JetEvaluation& jet,
    const Vector& qdot) {
  detail::RequireDim(geom.dim(), lag_rel.dim(), "pulled_dynamic_energize");
  detail::RequireDim(jet.m(), lag_rel.dim(), "pulled_dynamic_energize jet");
  detail::RequireDim(qdot.size(), jet.n(), "pulled_dynamic_energize qdot");
  const ReferenceSample s = ref(t);
  const Vector x_rel = jet.x - s.x;
  const Vector v_rel = jet.xdot - s.xdot;
  const LagrangianTerms terms = lag_rel.eval(x_rel, v_rel);
  const Vector h = geom(jet.x, jet.xdot);

  const Matrix& J = jet.J;
  Matrix M_q = J.transpose() * terms.M * J;
  M_q = 0.5 * (M_q + M_q.transpose()).eval();
  const Vector MJdq = terms.M * jet.Jdot_qdot;
  // Pulled geometry (M_q, M_q h_q) and pulled relative Lagrangian force.
  const Vector geom_force = J.transpose() * (terms.M * h + MJdq);
  const Vector lag_force =
      J.transpose() * (terms.f + MJdq - terms.M * s.xddot);

  const Vector qdot_rel = qdot - pseudo_inverse(J) * s.xdot;
  const Vector Mq_v = M_q * qdot_rel;
  const double denom = qdot_rel.dot(Mq_v);

  Eigen::FullPivLU<Matrix> lu(M_q);
  lu.setThreshold(1e-10);
  const bool rank_deficient = lu.rank() < M_q.rows();

  if (!(denom > kDegenerateEnergy)) {
    return {Spec(std::move(M_q), geom_force), 0.0, true, rank_deficient};
  }
  const double alpha = -qdot_rel.dot(geom_force - lag_force) / denom;
  return {Spec(std::move(M_q), geom_force + alpha * Mq_v), alpha, false,
          rank_deficient};
}

// ---------------------------------------------------------------------------
// Forcing potentials.

struct PotentialValue {
  double value = 0.0;
  Vector grad;
};

// Closed-form scalar potential with gradient.
class Potential {
 public:
  using EvalFn = std::function<PotentialValue(const Vector&)>;

  Potential(int dim, EvalFn fn, std::string name)
      : dim_(dim),
        fn_(std::make_shared<const EvalFn>(std::move(fn))),
        name_(std::move(name)) {}

  int dim() const { return dim_; }
  const std::string& name() const { return name_; }

  PotentialValue operator()(const Vector& x) const {
    detail::RequireDim(x.size(), dim_, name_.c_str());
    return (*fn_)(x);
  }

 private:
  int dim_;
  std::shared_ptr<const EvalFn> fn_;
  std::string name_;
};

struct DynamicPotentialGradient {
  Vector grad_x;    // d psi / dx
  Vector grad_ref;  // d psi / dx_ref, always -grad_x
  double value = 0.0;
};

// psi(x, x_ref) = psi_bar(x - x_ref), so d psi/dx = -d psi/dx_ref by
// construction.
inline DynamicPotentialGradient dynamic_potential_gradient(
    const Potential& psi_bar, const Vector& x, const ReferenceTrajectory& ref,
    double t) {
  detail::RequireDim(x.size(), psi_bar.dim(), "dynamic_potential_gradient");
  const ReferenceSample s = ref(t);
  PotentialValue p = psi_bar(x - s.x);
  Vector neg = -p.grad;
  return {std::move(p.grad), std::move(neg), p.value};
}

}  // namespace dynfab

#endif  // DYNFAB_DYNAMIC_HPP_
