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

// Composition of leaves into a root fabric on the configuration space, and
// the least-squares solve for non-holonomic robots.

#ifndef DYNFAB_PLANNER_HPP_
#define DYNFAB_PLANNER_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "dynfab/core.hpp"
#include "dynfab/diffgeo.hpp"
#include "dynfab/dynamic.hpp"
#include "dynfab/energy.hpp"
#include "dynfab/leaves.hpp"
#include "dynfab/robots.hpp"
#include "dynfab/spec.hpp"

namespace dynfab {

// Where leaf geometries are energized. kLeaf energizes every leaf in its own
// task space before the pullback. kRoot pulls the energy-weighted geometries
// (M_L, M_L h) and energizes their sum once in Q with the total energy; for
// one-dimensional leaves this keeps the geometry, which otherwise collapses
// onto the barrier energy's own Lagrangian spec.
enum class EnergizationSite { kLeaf, kRoot };

struct PlannerOptions {
  DampingParams damping;
  EnergizationSite energization = EnergizationSite::kRoot;
  // Added to the root metric for the single retry after a failed solve.
  double regularization = 1e-9;
};

// Instantaneous energy bookkeeping of one planner step, evaluated at the
// solved acceleration.
//
// energy_rate is dH/dt of the total relative energy: leaf Hamiltonians, the
// base kinetic energy 1/2 |qdot_rel|^2 and the attractor potentials.
// dissipation is qdot_rel^T B qdot_rel. reference_power collects the work done
// by moving references, i.e. the part of the leaf power that is measured
// along xdot_rel - J qdot_rel; it vanishes when every reference is at rest.
// energization_power is the sum of xdot_rel^T (f_L - f), zero up to rounding
// whenever the energization is not degenerate.
struct PowerBalance {
  double energy_rate = 0.0;
  double dissipation = 0.0;
  double reference_power = 0.0;
  double energization_power = 0.0;

  // energy_rate - reference_power + dissipation - energization_power; zero
  // for the exact solve.
  double residual() const {
    return energy_rate - reference_power + dissipation - energization_power;
  }
};

struct PlannerStep {
  Vector qddot;
  Spec root;
  double residual = 0.0;  // |M qddot + f|_inf / (1 + |f|_inf)
  bool collision = false;
  bool regularized = false;
  bool degenerate = false;  // an energization used the alpha = 0 fallback
  double alpha = 0.0;       // root energization factor (kRoot only)
  double min_barrier = std::numeric_limits<double>::infinity();
  double hamiltonian = 0.0;
  PowerBalance power;
};

class FabricPlanner {
 public:
  explicit FabricPlanner(int n, PlannerOptions options = {})
      : n_(n), options_(options) {
    if (n <= 0) throw ContractError("planner: dimension must be > 0");
    if (!(options_.damping.beta > 0.0)) {
      throw ContractError("planner: damping beta must be > 0");
    }
  }

  int n() const { return n_; }
  const PlannerOptions& options() const { return options_; }
  const std::vector<Leaf>& leaves() const { return leaves_; }

  void add_leaf(Leaf leaf) {
    detail::RequireDim(leaf.map.n(), n_, "planner leaf");
    if (leaf.role == LeafRole::kAttractor) {
      if (!leaf.potential || !leaf.reference) {
        throw ContractError("attractor leaf needs a potential and a goal");
      }
    } else if (leaf.potential) {
      throw ContractError("only attractor leaves carry a potential");
    }
    leaves_.push_back(std::move(leaf));
  }

  PlannerStep step(const Vector& q, const Vector& qdot, double t) const;

  Vector compute_action(const Vector& q, const Vector& qdot, double t) const {
    return step(q, qdot, t).qddot;
  }

 private:
  int n_;
  PlannerOptions options_;
  std::vector<Leaf> leaves_;
};

namespace detail {

// Per-leaf quantities kept until the acceleration is known.
struct LeafTerms {
  JetEvaluation jet;
  Vector v_rel;       // task velocity relative to the leaf reference
  Vector ref_accel;   // total reference acceleration in the task space
  Matrix M;
  Vector f_lag;       // Lagrangian force
  Vector grad_psi;    // attractor only
};

inline Vector SolveWithRetry(const Spec& root, double eps, bool* regularized) {
  try {
    return solve(root);
  } catch (const SolveError&) {
    *regularized = true;
    const Eigen::Index n = root.M().rows();
    return solve(Spec(root.M() + eps * Matrix::Identity(n, n), root.f()));
  }
}

}  // namespace detail

inline PlannerStep FabricPlanner::step(const Vector& q, const Vector& qdot,
                                       double t) const {
  detail::RequireDim(q.size(), n_, "planner q");
  detail::RequireDim(qdot.size(), n_, "planner qdot");
  detail::RequireFinite(q, "planner q");
  detail::RequireFinite(qdot, "planner qdot");
  const auto has_attractor =
      std::any_of(leaves_.begin(), leaves_.end(), [](const Leaf& l) {
        return l.role == LeafRole::kAttractor;
      });
  if (!has_attractor) throw ContractError("planner: no attractor leaf");

  PlannerStep out;
  Vector qdot_ref = Vector::Zero(n_);
  Vector qddot_ref = Vector::Zero(n_);
  bool base_set = false;
  const bool at_root = options_.energization == EnergizationSite::kRoot;

  // Root metric, force of the leaf specs and force of the leaf Lagrangians,
  // all pulled to Q.
  Matrix M_root = Matrix::Zero(n_, n_);
  Vector f_spec = Vector::Zero(n_);
  Vector f_lag = Vector::Zero(n_);
  Vector forcing = Vector::Zero(n_);
  std::vector<detail::LeafTerms> terms;
  terms.reserve(leaves_.size());

  for (const Leaf& leaf : leaves_) {
    detail::LeafTerms lt;
    lt.jet = leaf.map.eval(q, qdot, t);
    const JetEvaluation& jet = lt.jet;
    LagrangianTerms lag;
    Vector leaf_spec_f;  // relative-coordinate force of the leaf spec
    if (leaf.role == LeafRole::kAttractor) {
      const ReferenceSample s = (*leaf.reference)(t);
      const Vector x_rel = jet.x - s.x;
      lt.v_rel = jet.xdot - s.xdot;
      lt.ref_accel = s.xddot + jet.reference_accel;
      lag = leaf.energy.eval(x_rel, lt.v_rel);
      if (!leaf.geometry) {
        leaf_spec_f = lag.f;
      } else if (at_root) {
        leaf_spec_f = lag.M * ((*leaf.geometry)(jet.x, jet.xdot) + s.xddot);
      } else {
        const DynamicEnergizedSpec e =
            dynamic_energize(leaf.energy, *leaf.geometry, jet.x, jet.xdot,
                             *leaf.reference, t);
        out.degenerate = out.degenerate || e.degenerate;
        // Back to relative form: M xddot_rel + f = 0.
        leaf_spec_f = e.spec.f() + e.spec.M() * s.xddot;
      }
      const PotentialValue p = (*leaf.potential)(x_rel);
      lt.grad_psi = p.grad;
      out.hamiltonian += p.value;
      forcing += jet.J.transpose() * p.grad;
      // The first moving attractor defines the base reference in Q.
      if (!base_set && !leaf.reference->is_static()) {
        const Matrix Jp = pseudo_inverse(jet.J);
        qdot_ref = Jp * s.xdot;
        qddot_ref = Jp * (s.xddot - jet.Jdot_qdot);
        base_set = true;
      }
    } else {
      const double x = jet.x[0];
      out.min_barrier = std::min(out.min_barrier, x);
      if (!(x > 0.0)) {
        out.collision = true;
        continue;
      }
      lt.v_rel = jet.xdot;
      lt.ref_accel = jet.reference_accel;
      lag = leaf.energy.eval(jet.x, jet.xdot);
      if (!leaf.geometry) {
        leaf_spec_f = lag.f;
      } else if (at_root) {
        leaf_spec_f = lag.M * (*leaf.geometry)(jet.x, jet.xdot);
      } else {
        const EnergizedSpec e =
            energize(leaf.energy, *leaf.geometry, jet.x, jet.xdot);
        out.degenerate = out.degenerate || e.degenerate;
        leaf_spec_f = e.spec.f();
      }
    }
    out.hamiltonian += lag.H;
    // Dynamic pullback followed by the standard pullback.
    const Vector curvature = lag.M * (jet.Jdot_qdot - lt.ref_accel);
    Matrix pulled = jet.J.transpose() * lag.M * jet.J;
    M_root += 0.5 * (pulled + pulled.transpose());
    f_spec += jet.J.transpose() * (leaf_spec_f + curvature);
    f_lag += jet.J.transpose() * (lag.f + curvature);
    lt.M = std::move(lag.M);
    lt.f_lag = std::move(lag.f);
    terms.push_back(std::move(lt));
  }

  // Base inertia 1/2 |qdot - qdot_ref|^2, dynamically pulled.
  const Vector qdot_rel = qdot - qdot_ref;
  M_root += Matrix::Identity(n_, n_);
  f_spec -= qddot_ref;
  f_lag -= qddot_ref;
  out.hamiltonian += 0.5 * qdot_rel.squaredNorm();

  if (at_root) {
    const Vector Mv = M_root * qdot_rel;
    const double denom = qdot_rel.dot(Mv);
    if (denom > kDegenerateEnergy) {
      out.alpha = -qdot_rel.dot(f_spec - f_lag) / denom;
      f_spec += out.alpha * Mv;
    } else {
      out.degenerate = true;
    }
  }
  Vector f_root = f_spec + forcing + options_.damping.beta * qdot_rel;
  out.root = Spec(std::move(M_root), std::move(f_root));

  out.qddot =
      detail::SolveWithRetry(out.root, options_.regularization, &out.regularized);
  const Vector r = out.root.M() * out.qddot + out.root.f();
  out.residual =
      r.lpNorm<Eigen::Infinity>() / (1.0 + out.root.f().lpNorm<Eigen::Infinity>());

  PowerBalance& pb = out.power;
  pb.energy_rate = qdot_rel.dot(out.qddot - qddot_ref);
  pb.dissipation = options_.damping.beta * qdot_rel.squaredNorm();
  pb.energization_power = qdot_rel.dot(f_lag - f_spec);
  for (const detail::LeafTerms& lt : terms) {
    const Vector xddot_rel =
        lt.jet.J * out.qddot + lt.jet.Jdot_qdot - lt.ref_accel;
    const Vector residual_force = lt.M * xddot_rel + lt.f_lag;
    const Vector drift = lt.v_rel - lt.jet.J * qdot_rel;
    pb.energy_rate += lt.v_rel.dot(residual_force);
    pb.reference_power += drift.dot(residual_force);
    if (lt.grad_psi.size() > 0) {
      pb.energy_rate += lt.v_rel.dot(lt.grad_psi);
      pb.reference_power += drift.dot(lt.grad_psi);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Non-holonomic solve.

struct LeastSquaresResult {
  Vector qddot;
  double residual = 0.0;  // |M_nh qddot + f_nh|_2
};

// argmin |A u + b|^2 via the pseudo-inverse: u = -A^+ b.
inline LeastSquaresResult least_squares_action(const Matrix& A,
                                               const Vector& b) {
  detail::RequireDim(b.size(), A.rows(), "least squares");
  if (A.size() == 0 || A.cwiseAbs().maxCoeff() == 0.0) {
    throw SolveError("non-holonomic solve: zero constraint metric", 0.0);
  }
  LeastSquaresResult out;
  out.qddot = -pseudo_inverse(A) * b;
  out.residual = (A * out.qddot + b).norm();
  return out;
}

struct NonholonomicStep {
  Vector qddot;  // actuated accelerations, length k
  double residual = 0.0;
  PlannerStep root;
};

// The root fabric is computed on the pose space with pose velocity
// J_nh qdot; the actuated acceleration then minimizes
// |M (J_nh qddot + Jdot_nh qdot) + f|^2.
inline NonholonomicStep compute_nonholonomic_action(
    const FabricPlanner& planner, const NonholonomicConstraint& constraint,
    const Vector& pose, const Vector& qdot, double t) {
  detail::RequireDim(constraint.m(), planner.n(), "non-holonomic planner");
  const ConstraintJet cj = constraint.eval(pose, qdot, t);
  const Vector pose_dot = cj.J * qdot;
  NonholonomicStep out;
  out.root = planner.step(pose, pose_dot, t);
  const Matrix& M = out.root.root.M();
  const Matrix M_nh = M * cj.J;
  const Vector f_nh = M * cj.Jdot_qdot + out.root.root.f();
  LeastSquaresResult ls = least_squares_action(M_nh, f_nh);
  out.qddot = std::move(ls.qddot);
  out.residual = ls.residual;
  return out;
}

}  // namespace dynfab

#endif  // DYNFAB_PLANNER_HPP_
