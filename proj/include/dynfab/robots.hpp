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

// Kinematic models: point mass, planar serial arm, differential drive.

#ifndef DYNFAB_ROBOTS_HPP_
#define DYNFAB_ROBOTS_HPP_

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "dynfab/core.hpp"
#include "dynfab/diffgeo.hpp"

namespace dynfab {

struct JointLimit {
  double lower;
  double upper;
};

// Planar serial arm with revolute joints, base fixed at the origin.
class PlanarArm {
 public:
  explicit PlanarArm(std::vector<double> link_lengths,
                     std::vector<JointLimit> limits = {})
      : lengths_(std::move(link_lengths)), limits_(std::move(limits)) {
    if (lengths_.empty()) throw ContractError("planar arm: no links");
    for (double l : lengths_) {
      if (!(l > 0.0)) throw ContractError("planar arm: link length must be > 0");
    }
    if (!limits_.empty() && limits_.size() != lengths_.size()) {
      throw ContractError("planar arm: one limit per joint");
    }
    for (const auto& lim : limits_) {
      if (!(lim.lower < lim.upper)) {
        throw ContractError("planar arm: limit lower must be < upper");
      }
    }
  }

  int n() const { return static_cast<int>(lengths_.size()); }
  const std::vector<double>& link_lengths() const { return lengths_; }
  const std::vector<JointLimit>& limits() const { return limits_; }

 private:
  std::vector<double> lengths_;
  std::vector<JointLimit> limits_;
};

// Position of the point at `fraction` along link `link` (0-based).
//   p = sum_{i<link} l_i u(theta_i) + fraction l_link u(theta_link),
// with theta_i the cumulative joint angle. Column j of J is
// sum_{i>=j} l'_i u_perp(theta_i), and Jdot qdot = -sum l'_i thetadot_i^2 u.
inline DifferentialMap fk_map(const PlanarArm& arm, int link, double fraction) {
  if (link < 0 || link >= arm.n()) {
    throw ContractError("fk_map: link index out of range");
  }
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw ContractError("fk_map: fraction must lie in [0, 1]");
  }
  const int n = arm.n();
  std::vector<double> eff(arm.link_lengths().begin(),
                          arm.link_lengths().begin() + link + 1);
  eff[link] *= fraction;
  return DifferentialMap(
      n, 2, MapKind::kStatic,
      [n, link, eff](const Vector& q, const Vector& qdot, double) {
        JetEvaluation jet;
        jet.x = Vector::Zero(2);
        jet.J = Matrix::Zero(2, n);
        jet.Jdot_qdot = Vector::Zero(2);
        double theta = 0.0;
        double theta_dot = 0.0;
        for (int i = 0; i <= link; ++i) {
          theta += q[i];
          theta_dot += qdot[i];
          const double c = std::cos(theta);
          const double s = std::sin(theta);
          jet.x[0] += eff[i] * c;
          jet.x[1] += eff[i] * s;
          for (int j = 0; j <= i; ++j) {
            jet.J(0, j) -= eff[i] * s;
            jet.J(1, j) += eff[i] * c;
          }
          jet.Jdot_qdot[0] -= eff[i] * theta_dot * theta_dot * c;
          jet.Jdot_qdot[1] -= eff[i] * theta_dot * theta_dot * s;
        }
        jet.xdot = jet.J * qdot;
        jet.reference_velocity = Vector::Zero(2);
        jet.reference_accel = Vector::Zero(2);
        return jet;
      },
      "fk[" + std::to_string(link) + "@" + std::to_string(fraction) + "]");
}

inline DifferentialMap end_effector_map(const PlanarArm& arm) {
  return fk_map(arm, arm.n() - 1, 1.0);
}

// Collision points at the midpoint and end of every link.
inline std::vector<DifferentialMap> collision_point_maps(const PlanarArm& arm) {
  std::vector<DifferentialMap> maps;
  maps.reserve(2 * arm.n());
  for (int i = 0; i < arm.n(); ++i) {
    maps.push_back(fk_map(arm, i, 0.5));
    maps.push_back(fk_map(arm, i, 1.0));
  }
  return maps;
}

// ---------------------------------------------------------------------------
// Non-holonomic constraints.

struct ConstraintJet {
  Matrix J;          // m x k
  Vector Jdot_qdot;  // length m
};

// Velocity-level constraint xdot = J_nh(pose) qdot relating the actuated
// velocities qdot (dim k) to the pose velocity (dim m).
class NonholonomicConstraint {
 public:
  using EvalFn =
      std::function<ConstraintJet(const Vector&, const Vector&, double)>;

  NonholonomicConstraint(int m, int k, EvalFn fn)
      : m_(m), k_(k), fn_(std::make_shared<const EvalFn>(std::move(fn))) {
    if (k <= 0 || k > m) throw ContractError("constraint needs 0 < k <= m");
  }

  int m() const { return m_; }
  int k() const { return k_; }

  ConstraintJet eval(const Vector& pose, const Vector& qdot, double t) const {
    detail::RequireDim(pose.size(), m_, "constraint pose");
    detail::RequireDim(qdot.size(), k_, "constraint actuation");
    ConstraintJet jet = (*fn_)(pose, qdot, t);
    detail::RequireFinite(jet.J, "constraint Jacobian");
    detail::RequireFinite(jet.Jdot_qdot, "constraint curvature");
    return jet;
  }

 private:
  int m_;
  int k_;
  std::shared_ptr<const EvalFn> fn_;
};

// Differential-drive base with pose (x, y, theta).
struct DiffDrive {
  // When set, actuation is (right, left) wheel speed instead of (v, omega).
  bool wheel_speeds = false;
  double wheel_radius = 0.1;
  double track = 0.5;
};

inline double wrap_angle(double a) {
  constexpr double kPi = std::numbers::pi;
  a = std::remainder(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

// J_nh = [[cos th, 0], [sin th, 0], [0, 1]] for (v, omega). The wheel-speed
// variant right-multiplies by the wheel-to-(v, omega) matrix.
inline NonholonomicConstraint diffdrive_constraint(const DiffDrive& base = {}) {
  Matrix W = Matrix::Identity(2, 2);
  if (base.wheel_speeds) {
    if (!(base.wheel_radius > 0.0) || !(base.track > 0.0)) {
      throw ContractError("diffdrive: wheel radius and track must be > 0");
    }
    const double r = base.wheel_radius;
    W << r / 2.0, r / 2.0, r / base.track, -r / base.track;
  }
  return NonholonomicConstraint(
      3, 2, [W](const Vector& pose, const Vector& qdot, double) {
        const double c = std::cos(pose[2]);
        const double s = std::sin(pose[2]);
        Matrix Jvw(3, 2);
        Jvw << c, 0.0, s, 0.0, 0.0, 1.0;
        const Vector vw = W * qdot;
        Vector jdq(3);
        jdq << -s * vw[1] * vw[0], c * vw[1] * vw[0], 0.0;
        return ConstraintJet{Jvw * W, jdq};
      });
}

// Point rigidly attached `offset` ahead of the axle center:
// (x + l cos th, y + l sin th).
inline DifferentialMap diffdrive_point_map(double offset) {
  return DifferentialMap(
      3, 2, MapKind::kStatic,
      [offset](const Vector& pose, const Vector& pdot, double) {
        const double c = std::cos(pose[2]);
        const double s = std::sin(pose[2]);
        const double w = pdot[2];
        JetEvaluation jet;
        jet.x = Eigen::Vector2d(pose[0] + offset * c, pose[1] + offset * s);
        jet.J = Matrix(2, 3);
        jet.J << 1.0, 0.0, -offset * s, 0.0, 1.0, offset * c;
        jet.xdot = jet.J * pdot;
        jet.Jdot_qdot = Eigen::Vector2d(-offset * c * w * w, -offset * s * w * w);
        jet.reference_velocity = Vector::Zero(2);
        jet.reference_accel = Vector::Zero(2);
        return jet;
      },
      "diffdrive-point");
}

}  // namespace dynfab

#endif  // DYNFAB_ROBOTS_HPP_
