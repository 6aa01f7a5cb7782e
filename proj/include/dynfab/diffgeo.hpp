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

#ifndef DYNFAB_DIFFGEO_HPP_
#define DYNFAB_DIFFGEO_HPP_

#include <functional>
#include <memory>
#include <string>
#include <utility>

#include "dynfab/core.hpp"
#include "dynfab/reference.hpp"

namespace dynfab {

// First- and second-order data of a differential map at one state.
//
// For a time-parameterized map x = phi_t(q) the total derivatives are
//   xdot  = J qdot - reference_velocity
//   xddot = J qddot + Jdot_qdot - reference_accel
// where the reference terms collect the explicit time dependence. Both are
// zero for static maps.
struct JetEvaluation {
  Vector x;
  Vector xdot;
  Matrix J;
  Vector Jdot_qdot;
  Vector reference_velocity;
  Vector reference_accel;

  Eigen::Index m() const { return x.size(); }
  Eigen::Index n() const { return J.cols(); }
};

enum class MapKind { kStatic, kTimeParameterized };

// Smooth map from configuration space Q (dim n) to a task space X (dim m).
// Immutable; copies share the evaluation function.
class DifferentialMap {
 public:
  using EvalFn =
      std::function<JetEvaluation(const Vector&, const Vector&, double)>;

  DifferentialMap(int n, int m, MapKind kind, EvalFn fn, std::string name)
      : n_(n),
        m_(m),
        kind_(kind),
        fn_(std::make_shared<const EvalFn>(std::move(fn))),
        name_(std::move(name)) {
    if (n <= 0 || m <= 0) throw ContractError("map dimensions must be > 0");
  }

  int n() const { return n_; }
  int m() const { return m_; }
  MapKind kind() const { return kind_; }
  bool time_parameterized() const {
    return kind_ == MapKind::kTimeParameterized;
  }
  const std::string& name() const { return name_; }

  JetEvaluation eval(const Vector& q, const Vector& qdot, double t) const {
    detail::RequireDim(q.size(), n_, name_.c_str());
    detail::RequireDim(qdot.size(), n_, name_.c_str());
    detail::RequireFinite(q, name_.c_str());
    detail::RequireFinite(qdot, name_.c_str());
    return (*fn_)(q, qdot, t);
  }

 private:
  int n_;
  int m_;
  MapKind kind_;
  std::shared_ptr<const EvalFn> fn_;
  std::string name_;
};

inline JetEvaluation eval_jet(const DifferentialMap& map, const Vector& q,
                              const Vector& qdot, double t) {
  return map.eval(q, qdot, t);
}

// x = A q + b.
inline DifferentialMap AffineMap(const Matrix& A, const Vector& b,
                                 std::string name = "affine") {
  detail::RequireDim(b.size(), A.rows(), "affine map offset");
  const Eigen::Index m = A.rows();
  return DifferentialMap(
      static_cast<int>(A.cols()), static_cast<int>(m), MapKind::kStatic,
      [A, b, m](const Vector& q, const Vector& qdot, double) {
        return JetEvaluation{A * q + b,          A * qdot,
                             A,                  Vector::Zero(m),
                             Vector::Zero(m),    Vector::Zero(m)};
      },
      std::move(name));
}

inline DifferentialMap LinearMap(const Matrix& A) {
  return AffineMap(A, Vector::Zero(A.rows()), "linear");
}

inline DifferentialMap IdentityMap(int n) {
  return AffineMap(Matrix::Identity(n, n), Vector::Zero(n), "identity");
}

// x = sign * q[index] + offset; the one-dimensional coordinate used for
// joint and workspace limits.
inline DifferentialMap CoordinateMap(int n, int index, double sign,
                                     double offset) {
  if (index < 0 || index >= n) throw ContractError("coordinate index range");
  Matrix A = Matrix::Zero(1, n);
  A(0, index) = sign;
  Vector b(1);
  b << offset;
  return AffineMap(A, b, "coordinate[" + std::to_string(index) + "]");
}

// outer o inner. Reference terms of both stages are carried through so a
// composition with time-parameterized parts stays exact.
inline DifferentialMap Compose(const DifferentialMap& outer,
                               const DifferentialMap& inner) {
  detail::RequireDim(outer.n(), inner.m(), "compose");
  const MapKind kind =
      (outer.time_parameterized() || inner.time_parameterized())
          ? MapKind::kTimeParameterized
          : MapKind::kStatic;
  return DifferentialMap(
      inner.n(), outer.m(), kind,
      [outer, inner](const Vector& q, const Vector& qdot, double t) {
        JetEvaluation in = inner.eval(q, qdot, t);
        JetEvaluation out = outer.eval(in.x, in.xdot, t);
        JetEvaluation jet;
        jet.x = std::move(out.x);
        jet.xdot = std::move(out.xdot);
        jet.J = out.J * in.J;
        jet.Jdot_qdot = out.J * in.Jdot_qdot + out.Jdot_qdot;
        jet.reference_velocity =
            out.J * in.reference_velocity + out.reference_velocity;
        jet.reference_accel = out.J * in.reference_accel + out.reference_accel;
        return jet;
      },
      outer.name() + "(" + inner.name() + ")");
}

// Normalized distance to a (possibly moving) center in an m-dimensional
// space: x = |y - c(t)| / radius_sum - 1. Zero at contact, positive outside.
inline DifferentialMap PointDistanceMap(int m, ReferenceTrajectory center,
                                        double radius_sum) {
  if (!(radius_sum > 0.0)) throw ContractError("radius_sum must be > 0");
  detail::RequireDim(center.dim(), m, "distance map center");
  const bool moving = !center.is_static();
  return DifferentialMap(
      m, 1, moving ? MapKind::kTimeParameterized : MapKind::kStatic,
      [center = std::move(center), radius_sum](const Vector& y,
                                               const Vector& ydot, double t) {
        const ReferenceSample c = center(t);
        const Vector delta = y - c.x;
        const double dist = delta.norm();
        if (!(dist > 0.0)) {
          throw SingularityError("distance map evaluated at its center");
        }
        const Vector n = delta / dist;
        const Vector rel_vel = ydot - c.xdot;
        const double normal_vel = n.dot(rel_vel);
        JetEvaluation jet;
        jet.x = Vector::Constant(1, dist / radius_sum - 1.0);
        jet.J = n.transpose() / radius_sum;
        jet.xdot = Vector::Constant(1, normal_vel / radius_sum);
        // Curvature of |.|: (|v|^2 - (n.v)^2) / |delta|.
        jet.Jdot_qdot = Vector::Constant(
            1, (rel_vel.squaredNorm() - normal_vel * normal_vel) /
                   (dist * radius_sum));
        jet.reference_velocity = Vector::Constant(1, n.dot(c.xdot) / radius_sum);
        jet.reference_accel = Vector::Constant(1, n.dot(c.xddot) / radius_sum);
        return jet;
      },
      "distance");
}

// Distance of the point parent(q) to `center`, normalized by radius_sum.
inline DifferentialMap distance_map(const DifferentialMap& parent,
                                    const ReferenceTrajectory& center,
                                    double radius_sum) {
  return Compose(PointDistanceMap(parent.m(), center, radius_sum), parent);
}

inline DifferentialMap distance_map(const DifferentialMap& parent,
                                    const Vector& center, double radius_sum) {
  return distance_map(parent, ConstantReference(center), radius_sum);
}

}  // namespace dynfab

#endif  // DYNFAB_DIFFGEO_HPP_
