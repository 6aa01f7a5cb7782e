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

// JSON scenario configuration: parsing with field-level validation, and
// expansion of a batch into concrete, seeded scenario instances.

#ifndef DYNFAB_CONFIG_HPP_
#define DYNFAB_CONFIG_HPP_

#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "dynfab/core.hpp"
#include "dynfab/leaves.hpp"
#include "dynfab/reference.hpp"
#include "dynfab/sim.hpp"

namespace dynfab {

using Json = nlohmann::json;

// Extra obstacles drawn uniformly inside a box.
struct RandomObstacles {
  int count = 0;
  Vector center_min;
  Vector center_max;
  double radius_min = 0.3;
  double radius_max = 0.3;
  // Required gap between an obstacle surface and the start, the goal and,
  // for moving goals, the sampled reference path.
  double margin = 0.3;
};

// Point goal drawn uniformly inside a box.
struct RandomGoal {
  Vector min;
  Vector max;
};

// Initial configuration drawn uniformly inside a box.
struct RandomInitial {
  Vector q_min;
  Vector q_max;
};

struct BatchConfig {
  int runs = 1;
  std::uint64_t seed = 0;
  std::optional<RandomObstacles> obstacles;
  std::optional<RandomGoal> goal;
  std::optional<RandomInitial> initial;
};

struct OutputPaths {
  std::string csv;
  std::string json;
  std::string svg;
};

struct ScenarioConfig {
  Scenario base;
  BatchConfig batch;
  OutputPaths outputs;  // empty entries fall back to resolved_outputs()
};

// Configured output names, with <name>-<mode>.{csv,json,svg} for the
// entries left unset.
inline OutputPaths resolved_outputs(const ScenarioConfig& cfg) {
  const std::string stem =
      cfg.base.name + "-" + std::string(to_string(cfg.base.mode));
  OutputPaths out = cfg.outputs;
  if (out.csv.empty()) out.csv = stem + ".csv";
  if (out.json.empty()) out.json = stem + ".json";
  if (out.svg.empty()) out.svg = stem + ".svg";
  return out;
}

// Uniform double in [0, 1) built from the top 53 bits, so the sequence is
// identical across standard library implementations.
inline double UniformUnit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline Vector UniformBox(std::mt19937_64& rng, const Vector& lo,
                         const Vector& hi) {
  Vector v(lo.size());
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    v[i] = lo[i] + (hi[i] - lo[i]) * UniformUnit(rng);
  }
  return v;
}

// 2-D velocities of unit direction spaced evenly from -pi.
inline std::vector<Vector> UniformHeadings(int count, double speed) {
  std::vector<Vector> out;
  for (int k = 0; k < count; ++k) {
    const double th = -std::numbers::pi + 2.0 * std::numbers::pi * k / count;
    out.push_back(speed * Eigen::Vector2d(std::cos(th), std::sin(th)));
  }
  return out;
}

namespace detail {

// Collects every problem found while reading a document.
class ConfigReader {
 public:
  std::vector<std::string> errors;

  void Fail(const std::string& path, const std::string& msg) {
    errors.push_back(path + ": " + msg);
  }

  static std::string Join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  static std::string Index(const std::string& path, std::size_t i) {
    return path + "[" + std::to_string(i) + "]";
  }

  // False (with an error) when `j` is not an object. Unknown keys are
  // reported but do not stop the caller.
  bool Object(const Json& j, const std::string& path,
              std::initializer_list<const char*> allowed) {
    if (!j.is_object()) {
      Fail(path.empty() ? "<root>" : path, "must be an object");
      return false;
    }
    std::set<std::string> keys;
    for (const char* k : allowed) keys.insert(k);
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!keys.contains(it.key())) Fail(Join(path, it.key()), "unknown key");
    }
    return true;
  }

  double Number(const Json& o, const char* key, const std::string& path,
                double fallback, bool required = false) {
    const std::string p = Join(path, key);
    if (!o.contains(key)) {
      if (required) Fail(p, "required");
      return fallback;
    }
    const Json& v = o.at(key);
    if (!v.is_number()) {
      Fail(p, "must be a number");
      return fallback;
    }
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
      Fail(p, "must be finite");
      return fallback;
    }
    return d;
  }

  // Number constrained to > 0 (strict) or >= 0.
  double Positive(const Json& o, const char* key, const std::string& path,
                  double fallback, bool strict = true, bool required = false) {
    const double d = Number(o, key, path, fallback, required);
    if (o.contains(key) && o.at(key).is_number()) {
      if (strict && !(d > 0.0)) Fail(Join(path, key), "must be > 0");
      if (!strict && !(d >= 0.0)) Fail(Join(path, key), "must be >= 0");
    }
    return d;
  }

  long long Integer(const Json& o, const char* key, const std::string& path,
                    long long fallback, long long min_value,
                    bool required = false) {
    const std::string p = Join(path, key);
    if (!o.contains(key)) {
      if (required) Fail(p, "required");
      return fallback;
    }
    const Json& v = o.at(key);
    if (!v.is_number_integer()) {
      Fail(p, "must be an integer");
      return fallback;
    }
    const long long i = v.get<long long>();
    if (i < min_value) {
      Fail(p, "must be >= " + std::to_string(min_value));
      return fallback;
    }
    return i;
  }

  bool Bool(const Json& o, const char* key, const std::string& path,
            bool fallback) {
    if (!o.contains(key)) return fallback;
    if (!o.at(key).is_boolean()) {
      Fail(Join(path, key), "must be a boolean");
      return fallback;
    }
    return o.at(key).get<bool>();
  }

  std::string String(const Json& o, const char* key, const std::string& path,
                     std::string fallback, bool required = false) {
    const std::string p = Join(path, key);
    if (!o.contains(key)) {
      if (required) Fail(p, "required");
      return fallback;
    }
    if (!o.at(key).is_string()) {
      Fail(p, "must be a string");
      return fallback;
    }
    return o.at(key).get<std::string>();
  }

  // Numeric array; `dim` < 0 accepts any non-empty length.
  std::optional<Vector> Array(const Json& v, const std::string& p, int dim) {
    if (!v.is_array() || v.empty()) {
      Fail(p, "must be a non-empty array of numbers");
      return std::nullopt;
    }
    if (dim >= 0 && static_cast<int>(v.size()) != dim) {
      Fail(p, "must have " + std::to_string(dim) + " entries");
      return std::nullopt;
    }
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
        Fail(Index(p, i), "must be a finite number");
        return std::nullopt;
      }
      out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    }
    return out;
  }

  std::optional<Vector> Array(const Json& o, const char* key,
                              const std::string& path, int dim,
                              bool required = false) {
    if (!o.contains(key)) {
      if (required) Fail(Join(path, key), "required");
      return std::nullopt;
    }
    return Array(o.at(key), Join(path, key), dim);
  }

  // Exactly one of `keys` present; returns its index or -1.
  int OneOf(const Json& o, const std::string& path,
            std::initializer_list<const char*> keys) {
    int found = -1;
    int count = 0;
    int i = 0;
    for (const char* k : keys) {
      if (o.contains(k)) {
        found = i;
        ++count;
      }
      ++i;
    }
    if (count != 1) {
      std::string names;
      for (const char* k : keys) names += (names.empty() ? "" : "|") + std::string(k);
      Fail(path.empty() ? "<root>" : path, "needs exactly one of " + names);
      return -1;
    }
    return found;
  }
};

// Closed enumeration of analytic trajectories.
inline std::optional<ReferenceTrajectory> ReadAnalytic(ConfigReader& r,
                                                       const Json& j,
                                                       const std::string& path,
                                                       int dim) {
  if (!r.Object(j, path, {"expr", "params"})) return std::nullopt;
  const std::string expr = r.String(j, "expr", path, "", true);
  const std::string pp = ConfigReader::Join(path, "params");
  Json params = j.contains("params") ? j.at("params") : Json::object();
  if (expr == "circle") {
    if (!r.Object(params, pp, {"center", "radius", "omega", "phase"})) {
      return std::nullopt;
    }
    if (dim != 2) {
      r.Fail(ConfigReader::Join(path, "expr"), "circle needs a 2-D task space");
      return std::nullopt;
    }
    const auto c = r.Array(params, "center", pp, 2, true);
    const double radius = r.Positive(params, "radius", pp, 1.0, true, true);
    const double omega = r.Number(params, "omega", pp, 0.0, true);
    const double phase = r.Number(params, "phase", pp, 0.0);
    if (!c) return std::nullopt;
    return CircleReference(*c, radius, omega, phase);
  }
  if (expr == "sinusoid-line") {
    if (!r.Object(params, pp, {"center", "amplitude", "omega", "phase"})) {
      return std::nullopt;
    }
    const auto c = r.Array(params, "center", pp, dim, true);
    const auto a = r.Array(params, "amplitude", pp, dim, true);
    const double omega = r.Number(params, "omega", pp, 0.0, true);
    const double phase = r.Number(params, "phase", pp, 0.0);
    if (!c || !a) return std::nullopt;
    return SinusoidLineReference(*c, *a, omega, phase);
  }
  if (expr == "line") {
    if (!r.Object(params, pp, {"start", "velocity"})) return std::nullopt;
    const auto s = r.Array(params, "start", pp, dim, true);
    const auto v = r.Array(params, "velocity", pp, dim, true);
    if (!s || !v) return std::nullopt;
    return LineReference(*s, *v);
  }
  if (j.contains("expr")) {
    r.Fail(ConfigReader::Join(path, "expr"),
           "must be one of circle|sinusoid-line|line");
  }
  return std::nullopt;
}

inline void ReadRobot(ConfigReader& r, const Json& j, RobotConfig& robot) {
  const std::string path = "robot";
  if (!r.Object(j, path,
                {"type", "n", "link_lengths", "limits", "workspace_limit",
                 "body_radius", "point_offset", "wheel_speeds", "wheel_radius",
                 "track"})) {
    return;
  }
  const std::string type = r.String(j, "type", path, "", true);
  if (type == "point") {
    robot.type = RobotType::kPoint;
  } else if (type == "planar") {
    robot.type = RobotType::kPlanar;
  } else if (type == "diffdrive") {
    robot.type = RobotType::kDiffDrive;
  } else if (j.contains("type")) {
    r.Fail("robot.type", "must be one of point|planar|diffdrive");
  }
  robot.workspace_limit =
      r.Positive(j, "workspace_limit", path, robot.workspace_limit, false);
  robot.body_radius = r.Positive(j, "body_radius", path, 0.0, false);
  robot.point_offset =
      r.Positive(j, "point_offset", path, robot.point_offset, true);
  robot.diffdrive.wheel_speeds = r.Bool(j, "wheel_speeds", path, false);
  robot.diffdrive.wheel_radius =
      r.Positive(j, "wheel_radius", path, robot.diffdrive.wheel_radius);
  robot.diffdrive.track = r.Positive(j, "track", path, robot.diffdrive.track);

  if (robot.type != RobotType::kPlanar) {
    for (const char* k : {"n", "link_lengths", "limits"}) {
      if (j.contains(k)) {
        r.Fail(ConfigReader::Join(path, k), "only valid for planar robots");
      }
    }
    return;
  }
  const long long n = r.Integer(j, "n", path, 0, 1, !j.contains("link_lengths"));
  if (j.contains("link_lengths")) {
    if (const auto l = r.Array(j, "link_lengths", path, -1)) {
      robot.link_lengths.assign(l->data(), l->data() + l->size());
      for (std::size_t i = 0; i < robot.link_lengths.size(); ++i) {
        if (!(robot.link_lengths[i] > 0.0)) {
          r.Fail(ConfigReader::Index("robot.link_lengths", i), "must be > 0");
        }
      }
      if (n > 0 && static_cast<long long>(robot.link_lengths.size()) != n) {
        r.Fail("robot.n", "does not match robot.link_lengths");
      }
    }
  } else if (n > 0) {
    robot.link_lengths.assign(static_cast<std::size_t>(n), 1.0);
  }
  if (j.contains("limits")) {
    const Json& lims = j.at("limits");
    if (!lims.is_array() || lims.size() != robot.link_lengths.size()) {
      r.Fail("robot.limits", "must list one [lower, upper] pair per joint");
      return;
    }
    for (std::size_t i = 0; i < lims.size(); ++i) {
      const std::string p = ConfigReader::Index("robot.limits", i);
      const auto pair = r.Array(lims[i], p, 2);
      if (!pair) continue;
      if (!((*pair)[0] < (*pair)[1])) {
        r.Fail(p, "lower must be < upper");
        continue;
      }
      robot.joint_limits.push_back({(*pair)[0], (*pair)[1]});
    }
  }
}

inline void ReadPlanner(ConfigReader& r, const Json& j, Scenario& s) {
  const std::string path = "planner";
  if (!r.Object(j, path,
                {"mode", "beta", "energization", "attractor", "barrier"})) {
    return;
  }
  const std::string mode = r.String(j, "mode", path, "static");
  if (mode == "static") {
    s.mode = PlannerMode::kStatic;
  } else if (mode == "dynamic") {
    s.mode = PlannerMode::kDynamic;
  } else {
    r.Fail("planner.mode", "must be static|dynamic");
  }
  s.damping.beta = r.Positive(j, "beta", path, s.damping.beta);
  const std::string site = r.String(j, "energization", path, "root");
  if (site == "root") {
    s.energization = EnergizationSite::kRoot;
  } else if (site == "leaf") {
    s.energization = EnergizationSite::kLeaf;
  } else {
    r.Fail("planner.energization", "must be root|leaf");
  }
  if (j.contains("attractor")) {
    const Json& a = j.at("attractor");
    const std::string p = "planner.attractor";
    if (r.Object(a, p, {"k", "alpha_psi", "m_upper", "m_lower", "alpha_metric"})) {
      AttractorParams& ap = s.attractor;
      ap.k = r.Positive(a, "k", p, ap.k);
      ap.alpha_psi = r.Positive(a, "alpha_psi", p, ap.alpha_psi);
      ap.m_upper = r.Positive(a, "m_upper", p, ap.m_upper);
      ap.m_lower = r.Positive(a, "m_lower", p, ap.m_lower);
      ap.alpha_metric = r.Positive(a, "alpha_metric", p, ap.alpha_metric);
    }
  }
  if (j.contains("barrier")) {
    const Json& b = j.at("barrier");
    const std::string p = "planner.barrier";
    if (r.Object(b, p, {"lambda", "k_b", "exponent", "directional"})) {
      BarrierParams& bp = s.barrier;
      bp.lambda = r.Positive(b, "lambda", p, bp.lambda);
      bp.k_b = r.Positive(b, "k_b", p, bp.k_b, false);
      bp.exponent = r.Positive(b, "exponent", p, bp.exponent);
      bp.directional = r.Bool(b, "directional", p, bp.directional);
    }
  }
}

inline void ReadGoal(ConfigReader& r, const Json& j, Scenario& s) {
  const std::string path = "goal";
  if (!r.Object(j, path, {"point", "analytic", "spline", "tolerance"})) return;
  s.goal_tolerance = r.Positive(j, "tolerance", path, s.goal_tolerance);
  switch (r.OneOf(j, path, {"point", "analytic", "spline"})) {
    case 0:
      if (const auto p = r.Array(j, "point", path, 2)) {
        s.goal_kind = GoalKind::kPoint;
        s.goal = ConstantReference(*p);
      }
      break;
    case 1:
      if (auto ref = ReadAnalytic(r, j.at("analytic"), "goal.analytic", 2)) {
        s.goal_kind = GoalKind::kAnalytic;
        s.goal = std::move(*ref);
      }
      break;
    case 2: {
      const Json& sp = j.at("spline");
      const std::string p = "goal.spline";
      if (!r.Object(sp, p, {"control_points", "duration"})) break;
      const double duration = r.Positive(sp, "duration", p, 1.0, true, true);
      if (!sp.contains("control_points") || !sp.at("control_points").is_array() ||
          sp.at("control_points").size() != 3) {
        r.Fail(ConfigReader::Join(p, "control_points"),
               "must list exactly 3 points");
        break;
      }
      std::vector<Vector> cps;
      const Json& list = sp.at("control_points");
      for (std::size_t i = 0; i < list.size(); ++i) {
        const auto c =
            r.Array(list[i], ConfigReader::Index(p + ".control_points", i), 2);
        if (c) cps.push_back(*c);
      }
      if (cps.size() == 3) {
        s.goal_kind = GoalKind::kSpline;
        s.goal = QuadraticBezierReference(cps[0], cps[1], cps[2], duration);
      }
      break;
    }
    default:
      break;
  }
}

inline void ReadObstacles(ConfigReader& r, const Json& j, Scenario& s) {
  if (!j.is_array()) {
    r.Fail("obstacles", "must be an array");
    return;
  }
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string path = ConfigReader::Index("obstacles", i);
    const Json& o = j[i];
    if (!r.Object(o, path, {"center", "trajectory", "radius"})) continue;
    const double radius = r.Positive(o, "radius", path, 1.0, true, true);
    std::optional<ReferenceTrajectory> center;
    switch (r.OneOf(o, path, {"center", "trajectory"})) {
      case 0:
        if (const auto c = r.Array(o, "center", path, 2)) {
          center = ConstantReference(*c);
        }
        break;
      case 1:
        center = ReadAnalytic(r, o.at("trajectory"), path + ".trajectory", 2);
        break;
      default:
        break;
    }
    if (center && radius > 0.0) s.obstacles.emplace_back(*center, radius);
  }
}

inline void ReadInitial(ConfigReader& r, const Json& j, Scenario& s) {
  const std::string path = "initial";
  if (!r.Object(j, path, {"q", "qdot", "speed", "headings"})) return;
  const int n = s.robot.config_dim();
  const int k = s.robot.velocity_dim();
  const auto q = r.Array(j, "q", path, n, true);
  const bool headings = j.contains("headings");
  if (headings && j.contains("qdot")) {
    r.Fail("initial.headings", "cannot be combined with initial.qdot");
    return;
  }
  if (headings) {
    const long long count = r.Integer(j, "headings", path, 1, 1);
    const double speed = r.Positive(j, "speed", path, 1.0, false);
    if (s.robot.type != RobotType::kPoint) {
      r.Fail("initial.headings", "only valid for point robots");
      return;
    }
    if (!q) return;
    for (const Vector& v : UniformHeadings(static_cast<int>(count), speed)) {
      s.initial_states.push_back({*q, v});
    }
    return;
  }
  if (j.contains("speed")) r.Fail("initial.speed", "requires initial.headings");
  const auto qdot = r.Array(j, "qdot", path, k);
  if (q) s.initial_states.push_back({*q, qdot ? *qdot : Vector(Vector::Zero(k))});
}

inline void ReadBatch(ConfigReader& r, const Json& j, ScenarioConfig& cfg) {
  const std::string path = "batch";
  if (!r.Object(j, path, {"runs", "seed", "randomize"})) return;
  BatchConfig& b = cfg.batch;
  b.runs = static_cast<int>(r.Integer(j, "runs", path, 1, 1));
  b.seed = static_cast<std::uint64_t>(r.Integer(j, "seed", path, 0, 0));
  if (!j.contains("randomize")) return;
  const Json& rz = j.at("randomize");
  const std::string rp = "batch.randomize";
  if (!r.Object(rz, rp, {"obstacles", "goal", "initial"})) return;
  const int n = cfg.base.robot.config_dim();
  if (rz.contains("obstacles")) {
    const Json& o = rz.at("obstacles");
    const std::string p = rp + ".obstacles";
    if (r.Object(o, p, {"count", "center_min", "center_max", "radius_min",
                        "radius_max", "margin"})) {
      RandomObstacles ro;
      ro.count = static_cast<int>(r.Integer(o, "count", p, 1, 1, true));
      const auto lo = r.Array(o, "center_min", p, 2, true);
      const auto hi = r.Array(o, "center_max", p, 2, true);
      ro.radius_min = r.Positive(o, "radius_min", p, ro.radius_min);
      ro.radius_max = r.Positive(o, "radius_max", p, ro.radius_min);
      ro.margin = r.Positive(o, "margin", p, ro.margin, false);
      if (ro.radius_max < ro.radius_min) {
        r.Fail(p + ".radius_max", "must be >= radius_min");
      }
      if (lo && hi) {
        if (!(lo->array() <= hi->array()).all()) {
          r.Fail(p + ".center_max", "must be >= center_min");
        }
        ro.center_min = *lo;
        ro.center_max = *hi;
        b.obstacles = ro;
      }
    }
  }
  if (rz.contains("goal")) {
    const Json& g = rz.at("goal");
    const std::string p = rp + ".goal";
    if (r.Object(g, p, {"min", "max"})) {
      const auto lo = r.Array(g, "min", p, 2, true);
      const auto hi = r.Array(g, "max", p, 2, true);
      if (cfg.base.goal_kind != GoalKind::kPoint) {
        r.Fail(p, "requires a point goal");
      } else if (lo && hi) {
        if (!(lo->array() <= hi->array()).all()) {
          r.Fail(p + ".max", "must be >= min");
        }
        b.goal = RandomGoal{*lo, *hi};
      }
    }
  }
  if (rz.contains("initial")) {
    const Json& g = rz.at("initial");
    const std::string p = rp + ".initial";
    if (r.Object(g, p, {"q_min", "q_max"})) {
      const auto lo = r.Array(g, "q_min", p, n, true);
      const auto hi = r.Array(g, "q_max", p, n, true);
      if (lo && hi) {
        if (!(lo->array() <= hi->array()).all()) {
          r.Fail(p + ".q_max", "must be >= q_min");
        }
        b.initial = RandomInitial{*lo, *hi};
      }
    }
  }
}

inline void ReadOutputs(ConfigReader& r, const Json& j, ScenarioConfig& cfg) {
  if (!r.Object(j, "outputs", {"csv", "json", "svg"})) return;
  cfg.outputs.csv = r.String(j, "csv", "outputs", cfg.outputs.csv);
  cfg.outputs.json = r.String(j, "json", "outputs", cfg.outputs.json);
  cfg.outputs.svg = r.String(j, "svg", "outputs", cfg.outputs.svg);
}

}  // namespace detail

// Parses and validates a scenario document. Throws ValidationError listing
// every offending field.
inline ScenarioConfig parse_config(const Json& doc) {
  detail::ConfigReader r;
  ScenarioConfig cfg;
  Scenario& s = cfg.base;
  if (!r.Object(doc, "",
                {"name", "description", "robot", "planner", "goal", "initial",
                 "obstacles", "integration", "batch", "outputs"})) {
    throw ValidationError(r.errors);
  }
  s.name = r.String(doc, "name", "", "", true);
  s.description = r.String(doc, "description", "", "");
  if (doc.contains("robot")) {
    detail::ReadRobot(r, doc.at("robot"), s.robot);
  } else {
    r.Fail("robot", "required");
  }
  if (doc.contains("planner")) detail::ReadPlanner(r, doc.at("planner"), s);
  if (doc.contains("goal")) {
    detail::ReadGoal(r, doc.at("goal"), s);
  } else {
    r.Fail("goal", "required");
  }
  if (doc.contains("obstacles")) detail::ReadObstacles(r, doc.at("obstacles"), s);
  if (doc.contains("initial")) {
    detail::ReadInitial(r, doc.at("initial"), s);
  } else {
    r.Fail("initial", "required");
  }
  if (doc.contains("integration")) {
    const Json& in = doc.at("integration");
    if (r.Object(in, "integration", {"dt", "T", "record_timing"})) {
      s.dt = r.Positive(in, "dt", "integration", s.dt);
      s.T = r.Positive(in, "T", "integration", s.T);
      s.record_timing = r.Bool(in, "record_timing", "integration", true);
      if (s.dt > 0.0 && s.T > 0.0 && s.T < s.dt) {
        r.Fail("integration.T", "must be >= integration.dt");
      }
    }
  }
  if (doc.contains("batch")) detail::ReadBatch(r, doc.at("batch"), cfg);
  if (doc.contains("outputs")) detail::ReadOutputs(r, doc.at("outputs"), cfg);
  if (!r.errors.empty()) throw ValidationError(r.errors);
  s.seed = cfg.batch.seed;
  return cfg;
}

inline ScenarioConfig parse_config(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError({std::string("<document>: ") + e.what()});
  }
  return parse_config(doc);
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError({path + ": cannot open file"});
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

// Expands a batch into `runs` scenario instances. Instance i draws its random
// elements from mt19937_64 seeded with seed + i, so an instance does not
// depend on how many others precede it.
inline std::vector<Scenario> expand_batch(const ScenarioConfig& cfg) {
  std::vector<Scenario> out;
  out.reserve(static_cast<std::size_t>(cfg.batch.runs));
  for (int i = 0; i < cfg.batch.runs; ++i) {
    Scenario s = cfg.base;
    s.seed = cfg.batch.seed + static_cast<std::uint64_t>(i);
    std::mt19937_64 rng(s.seed);
    if (cfg.batch.initial) {
      for (InitialState& init : s.initial_states) {
        init.q = UniformBox(rng, cfg.batch.initial->q_min, cfg.batch.initial->q_max);
      }
    }
    if (cfg.batch.goal) {
      s.goal = ConstantReference(UniformBox(rng, cfg.batch.goal->min,
                                            cfg.batch.goal->max));
    }
    if (cfg.batch.obstacles) {
      const RandomObstacles& ro = *cfg.batch.obstacles;
      const RobotModel robot = build_robot(s.robot);
      std::vector<Vector> keep_out;
      for (const InitialState& init : s.initial_states) {
        keep_out.push_back(robot.task_map
                               .eval(init.q, Vector::Zero(init.q.size()), 0.0)
                               .x);
      }
      keep_out.push_back(s.goal_position(0.0));
      if (!s.goal.is_static()) {
        constexpr int kPathSamples = 300;
        for (int k = 0; k <= kPathSamples; ++k) {
          keep_out.push_back(s.goal(s.T * k / kPathSamples).x);
        }
      }
      constexpr int kMaxAttempts = 10000;
      int placed = 0;
      for (int attempt = 0; attempt < kMaxAttempts && placed < ro.count;
           ++attempt) {
        const Vector c = UniformBox(rng, ro.center_min, ro.center_max);
        const double radius =
            ro.radius_min + (ro.radius_max - ro.radius_min) * UniformUnit(rng);
        bool ok = true;
        for (const Vector& p : keep_out) {
          if ((p - c).norm() < radius + ro.margin) ok = false;
        }
        if (!ok) continue;
        s.obstacles.emplace_back(c, radius);
        ++placed;
      }
      if (placed < ro.count) {
        throw ValidationError(
            {"batch.randomize.obstacles: cannot place obstacles clear of the "
             "start and goal"});
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace dynfab

#endif  // DYNFAB_CONFIG_HPP_
