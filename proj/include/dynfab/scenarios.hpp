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

// Built-in benchmark scenarios, stored as configuration documents so they go
// through the same validation as user files.

#ifndef DYNFAB_SCENARIOS_HPP_
#define DYNFAB_SCENARIOS_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dynfab/config.hpp"

namespace dynfab {

struct BuiltinScenario {
  std::string_view name;
  std::string_view document;
};

inline const std::vector<BuiltinScenario>& builtin_scenarios() {
  static const std::vector<BuiltinScenario> kAll = {
      {"point-1obs", R"({
  "name": "point-1obs",
  "description": "Point robot starting at [3, 2] with unit speed in 10 evenly spaced headings, static goal [-2, -1], one sphere obstacle at [0.5, 0] with radius 0.8. Static fabrics are expected to reach the goal from every heading.",
  "robot": {"type": "point"},
  "planner": {"mode": "static"},
  "goal": {"point": [-2.0, -1.0], "tolerance": 0.1},
  "initial": {"q": [3.0, 2.0], "speed": 1.0, "headings": 10},
  "obstacles": [{"center": [0.5, 0.0], "radius": 0.8}],
  "integration": {"dt": 0.01, "T": 15.0}
})"},
      {"point-2obs", R"({
  "name": "point-2obs",
  "description": "The point-1obs setup with a second obstacle at [0, 1] (radius 0.8) forming a concave pocket in front of the start. A static attractor gets trapped in the pocket without colliding.",
  "robot": {"type": "point"},
  "planner": {"mode": "static"},
  "goal": {"point": [-2.0, -1.0], "tolerance": 0.1},
  "initial": {"q": [3.0, 2.0], "speed": 1.0, "headings": 10},
  "obstacles": [
    {"center": [0.5, 0.0], "radius": 0.8},
    {"center": [0.0, 1.0], "radius": 0.8}
  ],
  "integration": {"dt": 0.01, "T": 15.0}
})"},
      {"point-spline", R"({
  "name": "point-spline",
  "description": "The point-2obs setup guided by a quadratic spline with 3 control points that passes below both obstacles. The dynamic attractor follows the spline and escapes the pocket.",
  "robot": {"type": "point"},
  "planner": {"mode": "dynamic"},
  "goal": {"spline": {"control_points": [[3.0, 2.0], [1.5, -3.0], [-2.0, -1.0]], "duration": 8.0}, "tolerance": 0.1},
  "initial": {"q": [3.0, 2.0], "speed": 1.0, "headings": 10},
  "obstacles": [
    {"center": [0.5, 0.0], "radius": 0.8},
    {"center": [0.0, 1.0], "radius": 0.8}
  ],
  "integration": {"dt": 0.01, "T": 15.0}
})"},
      {"point-obstructed-spline", R"({
  "name": "point-obstructed-spline",
  "description": "The point-spline setup with a third obstacle placed on the spline. Reaching the goal is not required; the robot must stay collision free.",
  "robot": {"type": "point"},
  "planner": {"mode": "dynamic"},
  "goal": {"spline": {"control_points": [[3.0, 2.0], [1.5, -3.0], [-2.0, -1.0]], "duration": 8.0}, "tolerance": 0.1},
  "initial": {"q": [3.0, 2.0], "speed": 1.0, "headings": 10},
  "obstacles": [
    {"center": [0.5, 0.0], "radius": 0.8},
    {"center": [0.0, 1.0], "radius": 0.8},
    {"center": [1.0, -1.25], "radius": 0.45}
  ],
  "integration": {"dt": 0.01, "T": 15.0}
})"},
      {"planar4", R"({
  "name": "planar4",
  "description": "Planar four-link arm with unit links and joint limits of +-2.8 rad reaching a static end-effector goal [-1, 2.5] past one obstacle at [1.5, 3.6] (radius 0.4).",
  "robot": {"type": "planar", "link_lengths": [1.0, 1.0, 1.0, 1.0], "limits": [[-2.8, 2.8], [-2.8, 2.8], [-2.8, 2.8], [-2.8, 2.8]]},
  "planner": {"mode": "static", "beta": 12.0, "attractor": {"alpha_psi": 2.0, "m_upper": 0.5}},
  "goal": {"point": [-1.0, 2.5], "tolerance": 0.1},
  "initial": {"q": [0.3, 0.3, 0.3, 0.3], "qdot": [0.0, 0.0, 0.0, 0.0]},
  "obstacles": [{"center": [1.5, 3.6], "radius": 0.4}],
  "integration": {"dt": 0.01, "T": 15.0}
})"},
      {"planar5", R"({
  "name": "planar5",
  "description": "Planar five-link arm with unit links whose end effector starts at [2.389, 3.337] next to two overlapping obstacles that block the way to the goal [-2.2, 3.4]. A static attractor presses the arm against the obstacles and stalls without colliding.",
  "robot": {"type": "planar", "link_lengths": [1.0, 1.0, 1.0, 1.0, 1.0], "limits": [[-2.8, 2.8], [-2.8, 2.8], [-2.8, 2.8], [-2.8, 2.8], [-2.8, 2.8]]},
  "planner": {"mode": "static", "beta": 12.0, "attractor": {"alpha_psi": 2.0, "m_upper": 0.5}},
  "goal": {"point": [-2.2, 3.4], "tolerance": 0.1},
  "initial": {"q": [0.0, 0.6, 0.3, 0.6, 0.2], "qdot": [0.0, 0.0, 0.0, 0.0, 0.0]},
  "obstacles": [
    {"center": [1.75, 3.05], "radius": 0.43},
    {"center": [1.75, 3.65], "radius": 0.43}
  ],
  "integration": {"dt": 0.01, "T": 15.0}
})"},
      {"planar5-spline", R"({
  "name": "planar5-spline",
  "description": "The planar5 setup guided by an end-effector spline with 3 control points that dips below the obstacles. The dynamic attractor follows it to the goal.",
  "robot": {"type": "planar", "link_lengths": [1.0, 1.0, 1.0, 1.0, 1.0], "limits": [[-2.8, 2.8], [-2.8, 2.8], [-2.8, 2.8], [-2.8, 2.8], [-2.8, 2.8]]},
  "planner": {"mode": "dynamic", "beta": 12.0, "attractor": {"alpha_psi": 2.0, "m_upper": 0.5}},
  "goal": {"spline": {"control_points": [[2.389, 3.337], [1.9, 1.5], [-2.2, 3.4]], "duration": 8.0}, "tolerance": 0.1},
  "initial": {"q": [0.0, 0.6, 0.3, 0.6, 0.2], "qdot": [0.0, 0.0, 0.0, 0.0, 0.0]},
  "obstacles": [
    {"center": [1.75, 3.05], "radius": 0.43},
    {"center": [1.75, 3.65], "radius": 0.43}
  ],
  "integration": {"dt": 0.01, "T": 15.0}
})"},
      {"point-follow", R"({
  "name": "point-follow",
  "description": "Point robot starting at [0.5, 4.5] following the circle [-4 sin(0.2 t), 4 cos(0.2 t)] among 5 random obstacles; 20 seeds. Compare summed error of the dynamic and static planners.",
  "robot": {"type": "point"},
  "planner": {"mode": "dynamic"},
  "goal": {"analytic": {"expr": "circle", "params": {"center": [0.0, 0.0], "radius": 4.0, "omega": 0.2, "phase": 1.5707963267948966}}, "tolerance": 0.1},
  "initial": {"q": [0.5, 4.5], "qdot": [0.0, 0.0]},
  "integration": {"dt": 0.01, "T": 15.0},
  "batch": {"runs": 20, "seed": 1, "randomize": {"obstacles": {"count": 5, "center_min": [-4.5, -4.5], "center_max": [4.5, 4.5], "radius_min": 0.3, "radius_max": 0.5, "margin": 0.3}}}
})"},
      {"planar-follow", R"({
  "name": "planar-follow",
  "description": "Planar four-link arm whose end effector follows a circle of radius 1 around [2, 0] at 0.3 rad/s, with one obstacle near the circle.",
  "robot": {"type": "planar", "link_lengths": [1.0, 1.0, 1.0, 1.0], "limits": [[-2.8, 2.8], [-2.8, 2.8], [-2.8, 2.8], [-2.8, 2.8]]},
  "planner": {"mode": "dynamic", "beta": 12.0, "attractor": {"alpha_psi": 2.0, "m_upper": 0.5}},
  "goal": {"analytic": {"expr": "circle", "params": {"center": [2.0, 0.0], "radius": 1.0, "omega": 0.3, "phase": 0.0}}, "tolerance": 0.1},
  "initial": {"q": [0.3, -0.3, -0.3, -0.3], "qdot": [0.0, 0.0, 0.0, 0.0]},
  "obstacles": [{"center": [2.0, 1.6], "radius": 0.3}],
  "integration": {"dt": 0.01, "T": 15.0}
})"},
      {"point-moving-obs", R"({
  "name": "point-moving-obs",
  "description": "Point robot crossing the path of an obstacle moving along [0, -2.5 cos(t)] (radius 0.6) toward a random goal; 20 seeds.",
  "robot": {"type": "point"},
  "planner": {"mode": "dynamic"},
  "goal": {"point": [3.0, 0.0], "tolerance": 0.1},
  "initial": {"q": [-3.5, 0.0], "qdot": [0.0, 0.0]},
  "obstacles": [{"trajectory": {"expr": "sinusoid-line", "params": {"center": [0.0, 0.0], "amplitude": [0.0, -2.5], "omega": 1.0, "phase": 0.0}}, "radius": 0.6}],
  "integration": {"dt": 0.01, "T": 15.0},
  "batch": {"runs": 20, "seed": 1, "randomize": {"goal": {"min": [2.5, -2.5], "max": [4.0, 2.5]}}}
})"},
      {"planar-moving-obs", R"({
  "name": "planar-moving-obs",
  "description": "Planar four-link arm reaching a static goal while an obstacle moves along the line [-1.5, -2.0 + 0.3 t].",
  "robot": {"type": "planar", "link_lengths": [1.0, 1.0, 1.0, 1.0], "limits": [[-2.8, 2.8], [-2.8, 2.8], [-2.8, 2.8], [-2.8, 2.8]]},
  "planner": {"mode": "dynamic", "beta": 12.0, "attractor": {"alpha_psi": 2.0, "m_upper": 0.5}},
  "goal": {"point": [-2.0, 1.5], "tolerance": 0.1},
  "initial": {"q": [1.0, 0.3, 0.3, 0.3], "qdot": [0.0, 0.0, 0.0, 0.0]},
  "obstacles": [{"trajectory": {"expr": "line", "params": {"start": [-1.5, -2.0], "velocity": [0.0, 0.3]}}, "radius": 0.4}],
  "integration": {"dt": 0.01, "T": 15.0}
})"},
      {"diffdrive-goal", R"({
  "name": "diffdrive-goal",
  "description": "Differential-drive base actuated by forward speed and yaw rate, steering a point 0.2 m ahead of the axle to a goal past one obstacle.",
  "robot": {"type": "diffdrive", "point_offset": 0.2},
  "planner": {"mode": "static"},
  "goal": {"point": [2.5, 2.0], "tolerance": 0.1},
  "initial": {"q": [-3.0, -2.0, 0.0], "qdot": [0.0, 0.0]},
  "obstacles": [{"center": [0.0, 0.0], "radius": 0.6}],
  "integration": {"dt": 0.01, "T": 15.0}
})"},
  };
  return kAll;
}

inline std::optional<Json> builtin_document(std::string_view name) {
  for (const BuiltinScenario& b : builtin_scenarios()) {
    if (b.name == name) return Json::parse(b.document);
  }
  return std::nullopt;
}

}  // namespace dynfab

#endif  // DYNFAB_SCENARIOS_HPP_
