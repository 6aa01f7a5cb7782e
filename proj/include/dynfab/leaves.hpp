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

// Behavior components combined by the planner.

#ifndef DYNFAB_LEAVES_HPP_
#define DYNFAB_LEAVES_HPP_

#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include "dynfab/core.hpp"
#include "dynfab/diffgeo.hpp"
#include "dynfab/dynamic.hpp"
#include "dynfab/energy.hpp"
#include "dynfab/reference.hpp"

namespace dynfab {

enum class LeafRole { kAttractor, kAvoidance, kLimit };

inline const char* to_string(LeafRole role) {
  switch (role) {
    case LeafRole::kAttractor:
      return "attractor";
    case LeafRole::kAvoidance:
      return "avoidance";
    case LeafRole::kLimit:
      return "limit";
  }
  return "unknown";
}

// A sphere whose center may move.
struct Obstacle {
  ReferenceTrajectory center;
  double radius;

  Obstacle(ReferenceTrajectory c, double r) : center(std::move(c)), radius(r) {
    if (!(radius > 0.0)) throw ContractError("obstacle radius must be > 0");
  }
  Obstacle(const Vector& c, double r) : Obstacle(ConstantReference(c), r) {}

  bool moving() const { return !center.is_static(); }
};

// Attractor gains. The potential is a smoothed norm with slope k far from the
// goal; the metric blends from m_upper at the goal to m_lower far away.
struct AttractorParams {
  double k = 5.0;
  double alpha_psi = 10.0;
  double m_upper = 2.0;
  double m_lower = 0.2;
  double alpha_metric = 0.75;
};

// Barrier gains shared by collision and limit leaves: geometry
// psi_geo = k_b / x and energy L = lambda xdot^2 / x^exponent.
struct BarrierParams {
  double lambda = 0.7;
  double k_b = 2.0;
  double exponent = 3.0;
  bool directional = true;
};

// A behavior: a map into its task space, an energy (its priority metric), an
// optional geometry and, for attractors, a forcing potential and a reference.
//
// Attractors are evaluated in coordinates relative to `reference`. Their
// energy and potential take x - x_ref. Avoidance leaves on moving obstacles
// use a time-parameterized distance map, so their task coordinate is already
// relative to the obstacle.
struct Leaf {
  std::string name;
  LeafRole role;
  DifferentialMap map;
  Lagrangian energy;
  std::optional<Geometry> geometry;
  std::optional<Potential> potential;
  std::optional<ReferenceTrajectory> reference;

  bool dynamic() const {
    return (reference && !reference->is_static()) || map.time_parameterized();
  }
};

// psi(theta) = k (|theta| + log(1 + exp(-2 alpha |theta|)) / alpha) with
// gradient k tanh(alpha |theta|) theta / |theta|; smooth at the origin and
// bounded by k everywhere.
inline Potential SmoothedNormPotential(int dim, double k, double alpha) {
  if (!(k > 0.0) || !(alpha > 0.0)) {
    throw ContractError("smoothed norm potential: gains must be > 0");
  }
  return Potential(
      dim,
      [k, alpha](const Vector& theta) {
        const double r = theta.norm();
        PotentialValue p;
        // log1p(exp(-2 a r)) stays accurate for large r.
        p.value = k * (r + std::log1p(std::exp(-2.0 * alpha * r)) / alpha);
        if (r > 0.0) {
          p.grad = (k * std::tanh(alpha * r) / r) * theta;
        } else {
          p.grad = Vector::Zero(theta.size());
        }
        return p;
      },
      "smoothed-norm");
}

inline Leaf make_attractor(const ReferenceTrajectory& goal,
                           const DifferentialMap& task_map,
                           const AttractorParams& params = {}) {
  detail::RequireDim(goal.dim(), task_map.m(), "attractor goal");
  const int m = task_map.m();
  return Leaf{"attractor",
              LeafRole::kAttractor,
              task_map,
              AttractorMetricEnergy(m, params.m_upper, params.m_lower,
                                    params.alpha_metric),
              std::nullopt,
              SmoothedNormPotential(m, params.k, params.alpha_psi),
              goal};
}

inline Leaf make_attractor(const Vector& goal, const DifferentialMap& task_map,
                           const AttractorParams& params = {}) {
  return make_attractor(ConstantReference(goal), task_map, params);
}

inline Leaf make_barrier_leaf(std::string name, LeafRole role,
                              DifferentialMap map,
                              const BarrierParams& params) {
  if (map.m() != 1) throw ContractError("barrier leaf needs a 1-D task map");
  return Leaf{std::move(name),
              role,
              std::move(map),
              BarrierEnergy(params.lambda, params.exponent, params.directional),
              BarrierGeometry(params.k_b),
              std::nullopt,
              std::nullopt};
}

inline Leaf make_collision_leaf(const Obstacle& obstacle,
                                const DifferentialMap& body_map,
                                double body_radius,
                                const BarrierParams& params = {}) {
  const double radius_sum = obstacle.radius + body_radius;
  if (!(radius_sum > 0.0)) throw ContractError("radius sum must be > 0");
  return make_barrier_leaf(
      "collision(" + body_map.name() + ")", LeafRole::kAvoidance,
      distance_map(body_map, obstacle.center, radius_sum), params);
}

// Lower and upper barrier leaves on q[joint]: x = q - lower, x = upper - q.
inline std::pair<Leaf, Leaf> make_limit_leaf(int n, int joint, double lower,
                                             double upper,
                                             const BarrierParams& params = {}) {
  if (!(lower < upper)) throw ContractError("limit leaf: lower must be < upper");
  const std::string idx = std::to_string(joint);
  return {make_barrier_leaf("limit-lower[" + idx + "]", LeafRole::kLimit,
                            CoordinateMap(n, joint, 1.0, -lower), params),
          make_barrier_leaf("limit-upper[" + idx + "]", LeafRole::kLimit,
                            CoordinateMap(n, joint, -1.0, upper), params)};
}

struct DampingParams {
  double beta = 2.5;
};

// B xdot_rel with B = beta I.
inline Vector damping_term(const DampingParams& params, const Vector& x,
                           const Vector& xdot,
                           const ReferenceTrajectory* ref = nullptr,
                           double t = 0.0) {
  if (!(params.beta > 0.0)) throw ContractError("damping: beta must be > 0");
  if (ref == nullptr) return params.beta * xdot;
  return params.beta * relative_state(x, xdot, *ref, t).x_rel_dot;
}

}  // namespace dynfab

#endif  // DYNFAB_LEAVES_HPP_
