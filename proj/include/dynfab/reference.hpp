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

#ifndef DYNFAB_REFERENCE_HPP_
#define DYNFAB_REFERENCE_HPP_

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <utility>

#include "dynfab/core.hpp"

namespace dynfab {

// Position, velocity and acceleration of a reference at one instant.
struct ReferenceSample {
  Vector x;
  Vector xdot;
  Vector xddot;
};

enum class ReferenceKind { kConstant, kAnalytic, kSpline };

// A time-parameterized curve with analytic first and second derivatives.
// Used for moving goals, guidance paths and moving obstacle centers.
class ReferenceTrajectory {
 public:
  using SampleFn = std::function<ReferenceSample(double)>;

  ReferenceTrajectory(int dim, ReferenceKind kind, SampleFn fn,
                      std::string name)
      : dim_(dim),
        kind_(kind),
        fn_(std::make_shared<const SampleFn>(std::move(fn))),
        name_(std::move(name)) {}

  int dim() const { return dim_; }
  ReferenceKind kind() const { return kind_; }
  const std::string& name() const { return name_; }

  ReferenceSample operator()(double t) const {
    if (!std::isfinite(t)) throw NumericDomainError("reference: non-finite t");
    return (*fn_)(t);
  }

  // True when the reference is at rest for all time.
  bool is_static() const { return kind_ == ReferenceKind::kConstant; }

 private:
  int dim_;
  ReferenceKind kind_;
  std::shared_ptr<const SampleFn> fn_;
  std::string name_;
};

inline ReferenceTrajectory ConstantReference(const Vector& c) {
  detail::RequireFinite(c, "constant reference");
  const Eigen::Index m = c.size();
  return ReferenceTrajectory(
      static_cast<int>(m), ReferenceKind::kConstant,
      [c, m](double) {
        return ReferenceSample{c, Vector::Zero(m), Vector::Zero(m)};
      },
      "constant");
}

// center + radius * [cos(omega t + phase), sin(omega t + phase)].
inline ReferenceTrajectory CircleReference(const Vector& center, double radius,
                                           double omega, double phase) {
  detail::RequireDim(center.size(), 2, "circle reference center");
  return ReferenceTrajectory(
      2, ReferenceKind::kAnalytic,
      [=](double t) {
        const double a = omega * t + phase;
        const Eigen::Vector2d u(std::cos(a), std::sin(a));
        const Eigen::Vector2d du(-std::sin(a), std::cos(a));
        return ReferenceSample{center + radius * u, radius * omega * du,
                               -radius * omega * omega * u};
      },
      "circle");
}

// center + amplitude * cos(omega t + phase); a harmonic oscillation along
// the direction of `amplitude`.
inline ReferenceTrajectory SinusoidLineReference(const Vector& center,
                                                 const Vector& amplitude,
                                                 double omega, double phase) {
  detail::RequireDim(amplitude.size(), center.size(),
                     "sinusoid reference amplitude");
  return ReferenceTrajectory(
      static_cast<int>(center.size()), ReferenceKind::kAnalytic,
      [=](double t) {
        const double a = omega * t + phase;
        return ReferenceSample{center + amplitude * std::cos(a),
                               -amplitude * omega * std::sin(a),
                               -amplitude * omega * omega * std::cos(a)};
      },
      "sinusoid-line");
}

// start + velocity * t.
inline ReferenceTrajectory LineReference(const Vector& start,
                                         const Vector& velocity) {
  detail::RequireDim(velocity.size(), start.size(), "line reference velocity");
  const Eigen::Index m = start.size();
  return ReferenceTrajectory(
      static_cast<int>(m), ReferenceKind::kAnalytic,
      [=](double t) {
        return ReferenceSample{start + velocity * t, velocity, Vector::Zero(m)};
      },
      "line");
}

// Quadratic Bezier through three control points, traversed in `duration`
// seconds. After `duration` the reference rests at the last control point.
inline ReferenceTrajectory QuadraticBezierReference(const Vector& p0,
                                                    const Vector& p1,
                                                    const Vector& p2,
                                                    double duration) {
  detail::RequireDim(p1.size(), p0.size(), "bezier control point 1");
  detail::RequireDim(p2.size(), p0.size(), "bezier control point 2");
  if (!(duration > 0.0)) throw ContractError("bezier duration must be > 0");
  const Eigen::Index m = p0.size();
  return ReferenceTrajectory(
      static_cast<int>(m), ReferenceKind::kSpline,
      [=](double t) {
        if (t >= duration) {
          return ReferenceSample{p2, Vector::Zero(m), Vector::Zero(m)};
        }
        if (t < 0.0) {
          return ReferenceSample{p0, Vector::Zero(m), Vector::Zero(m)};
        }
        const double s = t / duration;
        const double u = 1.0 - s;
        return ReferenceSample{
            u * u * p0 + 2.0 * u * s * p1 + s * s * p2,
            (2.0 * u * (p1 - p0) + 2.0 * s * (p2 - p1)) / duration,
            2.0 * (p2 - 2.0 * p1 + p0) / (duration * duration)};
      },
      "spline");
}

// Same positions as `ref`, but with zero derivatives: the reference as seen
// by a planner that re-reads the current position every step and otherwise
// treats it as fixed.
inline ReferenceTrajectory Frozen(const ReferenceTrajectory& ref) {
  const int m = ref.dim();
  return ReferenceTrajectory(
      m, ref.kind(),
      [ref, m](double t) {
        ReferenceSample s = ref(t);
        s.xdot = Vector::Zero(m);
        s.xddot = Vector::Zero(m);
        return s;
      },
      ref.name() + "(frozen)");
}

}  // namespace dynfab

#endif  // DYNFAB_REFERENCE_HPP_
