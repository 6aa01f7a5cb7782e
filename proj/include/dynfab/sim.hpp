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

// Fixed-step closed-loop simulation of a fabric planner and the metrics
// derived from a run.

#ifndef DYNFAB_SIM_HPP_
#define DYNFAB_SIM_HPP_

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "dynfab/core.hpp"
#include "dynfab/diffgeo.hpp"
#include "dynfab/leaves.hpp"
#include "dynfab/planner.hpp"
#include "dynfab/reference.hpp"
#include "dynfab/robots.hpp"

namespace dynfab {

// Classical fourth-order Runge-Kutta step of ydot = f(y, t).
template <typename F>
Vector rk4_step(F&& f, const Vector& y, double t, double dt) {
  if (!(dt > 0.0)) throw ContractError("rk4_step: dt must be > 0");
  auto eval = [&](const Vector& s, double tt) {
    Vector d = f(s, tt);
    detail::RequireDim(d.size(), y.size(), "rk4 derivative");
    if (!d.allFinite()) throw NumericDomainError("rk4: non-finite derivative");
    return d;
  };
  const Vector k1 = eval(y, t);
  const Vector k2 = eval(y + 0.5 * dt * k1, t + 0.5 * dt);
  const Vector k3 = eval(y + 0.5 * dt * k2, t + 0.5 * dt);
  const Vector k4 = eval(y + dt * k3, t + dt);
  return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// ---------------------------------------------------------------------------
// Scenario description.

enum class RobotType { kPoint, kPlanar, kDiffDrive };
enum class PlannerMode { kStatic, kDynamic };

inline const char* to_string(RobotType t) {
  switch (t) {
    case RobotType::kPoint:
      return "point";
    case RobotType::kPlanar:
      return "planar";
    case RobotType::kDiffDrive:
      return "diffdrive";
  }
  return "unknown";
}

inline const char* to_string(PlannerMode m) {
  return m == PlannerMode::kStatic ? "static" : "dynamic";
}

struct RobotConfig {
  RobotType type = RobotType::kPoint;
  // Planar arm.
  std::vector<double> link_lengths;
  std::vector<JointLimit> joint_limits;
  // Point robot: barrier leaves keep each coordinate in [-w, w]; 0 disables.
  double workspace_limit = 5.0;
  // Radius added to the obstacle radius for every body point.
  double body_radius = 0.0;
  // Differential drive.
  DiffDrive diffdrive;
  double point_offset = 0.2;

  int config_dim() const {
    switch (type) {
      case RobotType::kPoint:
        return 2;
      case RobotType::kPlanar:
        return static_cast<int>(link_lengths.size());
      case RobotType::kDiffDrive:
        return 3;
    }
    return 0;
  }
  // Dimension of the integrated velocity: actuated velocities for the
  // differential drive, joint velocities otherwise.
  int velocity_dim() const {
    return type == RobotType::kDiffDrive ? 2 : config_dim();
  }
};

struct InitialState {
  Vector q;
  Vector qdot;
};

enum class GoalKind { kPoint, kAnalytic, kSpline };

struct Scenario {
  std::string name;
  std::string description;
  RobotConfig robot;
  PlannerMode mode = PlannerMode::kStatic;
  AttractorParams attractor;
  BarrierParams barrier;
  DampingParams damping;
  EnergizationSite energization = EnergizationSite::kRoot;
  GoalKind goal_kind = GoalKind::kPoint;
  ReferenceTrajectory goal = ConstantReference(Vector::Zero(2));
  std::vector<Obstacle> obstacles;
  std::vector<InitialState> initial_states;
  double dt = 0.01;
  double T = 15.0;
  double goal_tolerance = 0.1;
  std::uint64_t seed = 0;
  bool record_timing = true;

  // Target used for goal_reached: the final control point of a spline, the
  // current reference sample otherwise.
  Vector goal_position(double t) const {
    return goal_kind == GoalKind::kSpline ? goal(1e300).x : goal(t).x;
  }
};

// ---------------------------------------------------------------------------
// Robot and planner construction.

struct RobotModel {
  DifferentialMap task_map;
  std::vector<DifferentialMap> body_points;
  std::optional<NonholonomicConstraint> constraint;
};

inline RobotModel build_robot(const RobotConfig& cfg) {
  switch (cfg.type) {
    case RobotType::kPoint: {
      DifferentialMap id = IdentityMap(2);
      return {id, {id}, std::nullopt};
    }
    case RobotType::kPlanar: {
      const PlanarArm arm(cfg.link_lengths, cfg.joint_limits);
      return {end_effector_map(arm), collision_point_maps(arm), std::nullopt};
    }
    case RobotType::kDiffDrive: {
      DifferentialMap p = diffdrive_point_map(cfg.point_offset);
      DifferentialMap axle = diffdrive_point_map(0.0);
      return {p, {axle, p}, diffdrive_constraint(cfg.diffdrive)};
    }
  }
  throw ContractError("unknown robot type");
}

// The effective references seen by the planner: a static planner re-reads
// current positions but treats every reference as momentarily at rest.
inline ReferenceTrajectory planner_view(const ReferenceTrajectory& ref,
                                        PlannerMode mode) {
  if (mode == PlannerMode::kDynamic || ref.is_static()) return ref;
  return Frozen(ref);
}

inline FabricPlanner build_planner(const Scenario& s, const RobotModel& robot) {
  const int n = s.robot.config_dim();
  FabricPlanner planner(n, PlannerOptions{s.damping, s.energization});
  planner.add_leaf(make_attractor(planner_view(s.goal, s.mode), robot.task_map,
                                  s.attractor));
  for (const Obstacle& o : s.obstacles) {
    const Obstacle seen(planner_view(o.center, s.mode), o.radius);
    for (const DifferentialMap& body : robot.body_points) {
      planner.add_leaf(
          make_collision_leaf(seen, body, s.robot.body_radius, s.barrier));
    }
  }
  if (s.robot.type == RobotType::kPoint && s.robot.workspace_limit > 0.0) {
    for (int i = 0; i < n; ++i) {
      auto [lo, hi] = make_limit_leaf(n, i, -s.robot.workspace_limit,
                                      s.robot.workspace_limit, s.barrier);
      planner.add_leaf(std::move(lo));
      planner.add_leaf(std::move(hi));
    }
  }
  if (s.robot.type == RobotType::kPlanar) {
    for (int i = 0; i < static_cast<int>(s.robot.joint_limits.size()); ++i) {
      const JointLimit& lim = s.robot.joint_limits[i];
      auto [lo, hi] = make_limit_leaf(n, i, lim.lower, lim.upper, s.barrier);
      planner.add_leaf(std::move(lo));
      planner.add_leaf(std::move(hi));
    }
  }
  return planner;
}

// ---------------------------------------------------------------------------
// Records and metrics.

struct RunRecord {
  std::vector<double> t;
  std::vector<Vector> q;
  std::vector<Vector> qdot;
  std::vector<Vector> x_ee;
  std::vector<double> min_dist;     // meters; +inf without obstacles
  std::vector<double> solver_time;  // seconds per compute_action call
  bool goal_reached = false;
  bool collided = false;
  bool deadlocked = false;
  bool numeric_failure = false;
  std::optional<double> time_to_goal;
  std::string failure;
  // Energy bookkeeping over all steps (holonomic robots only).
  double max_power = -std::numeric_limits<double>::infinity();
  double max_balance_residual = 0.0;
  double max_rel_solve_residual = 0.0;
  // Differential drive: max |ydot cos th - xdot sin th|.
  double max_lateral_slip = 0.0;

  std::size_t rows() const { return t.size(); }
};

struct Metrics {
  double clearance = std::numeric_limits<double>::infinity();
  double path_length = 0.0;
  std::optional<double> time_to_goal;
  double summed_error = 0.0;
  double solver_time = 0.0;
  bool success = false;
};

// Distance in meters from every body point to every obstacle surface.
inline double min_obstacle_distance(const Scenario& s, const RobotModel& robot,
                                    const Vector& q, double t) {
  double best = std::numeric_limits<double>::infinity();
  if (s.obstacles.empty()) return best;
  const Vector zero = Vector::Zero(q.size());
  for (const DifferentialMap& body : robot.body_points) {
    const Vector p = body.eval(q, zero, t).x;
    for (const Obstacle& o : s.obstacles) {
      const double d =
          (p - o.center(t).x).norm() - o.radius - s.robot.body_radius;
      best = std::min(best, d);
    }
  }
  return best;
}

// Smallest barrier coordinate of all avoidance and limit leaves.
inline double min_barrier_coordinate(const FabricPlanner& planner,
                                     const Vector& q, const Vector& qdot,
                                     double t) {
  double best = std::numeric_limits<double>::infinity();
  for (const Leaf& leaf : planner.leaves()) {
    if (leaf.role == LeafRole::kAttractor) continue;
    best = std::min(best, leaf.map.eval(q, qdot, t).x[0]);
  }
  return best;
}

inline Metrics compute_metrics(const RunRecord& r, const Scenario& s) {
  if (r.rows() == 0) throw ContractError("compute_metrics: empty record");
  Metrics m;
  for (std::size_t k = 0; k < r.rows(); ++k) {
    m.clearance = std::min(m.clearance, r.min_dist[k]);
    if (k > 0) m.path_length += (r.x_ee[k] - r.x_ee[k - 1]).norm();
    m.summed_error += (r.x_ee[k] - s.goal(r.t[k]).x).norm() * s.dt;
    m.solver_time += r.solver_time[k];
  }
  m.solver_time /= static_cast<double>(r.rows());
  m.time_to_goal = r.time_to_goal;
  m.success = r.goal_reached && !r.collided && !r.numeric_failure;
  return m;
}

// ---------------------------------------------------------------------------
// Execution.

inline constexpr double kGoalSpeed = 0.1;
inline constexpr double kDeadlockSpeed = 1e-3;
inline constexpr double kDeadlockWindow = 1.0;

namespace detail {

inline double ElapsedSeconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace detail

inline RunRecord run_single(const Scenario& s, const InitialState& init) {
  if (!(s.dt > 0.0) || !(s.T >= s.dt) || !(s.goal_tolerance > 0.0)) {
    throw ContractError("scenario: need dt > 0, T >= dt, goal_tolerance > 0");
  }
  const RobotModel robot = build_robot(s.robot);
  const FabricPlanner planner = build_planner(s, robot);
  const int n = s.robot.config_dim();
  const int k = s.robot.velocity_dim();
  detail::RequireDim(init.q.size(), n, "initial q");
  detail::RequireDim(init.qdot.size(), k, "initial qdot");
  const bool nonholonomic = robot.constraint.has_value();

  // Pose-space velocity of the planner state.
  auto config_velocity = [&](const Vector& q, const Vector& v, double t) {
    return nonholonomic ? Vector(robot.constraint->eval(q, v, t).J * v) : v;
  };
  auto acceleration = [&](const Vector& q, const Vector& v, double t) {
    if (nonholonomic) {
      return compute_nonholonomic_action(planner, *robot.constraint, q, v, t)
          .qddot;
    }
    return planner.compute_action(q, v, t);
  };
  auto dynamics = [&](const Vector& y, double t) {
    const Vector q = y.head(n);
    const Vector v = y.tail(k);
    Vector d(n + k);
    d.head(n) = config_velocity(q, v, t);
    d.tail(k) = acceleration(q, v, t);
    return d;
  };

  RunRecord rec;
  const std::size_t steps =
      static_cast<std::size_t>(std::floor(s.T / s.dt + 1e-9));
  rec.t.reserve(steps + 1);
  Vector y(n + k);
  y << init.q, init.qdot;
  double still_since = -1.0;

  for (std::size_t i = 0;; ++i) {
    const double t = static_cast<double>(i) * s.dt;
    const Vector q = y.head(n);
    const Vector v = y.tail(k);
    const Vector qd = config_velocity(q, v, t);
    const JetEvaluation ee = robot.task_map.eval(q, qd, t);

    // Planner diagnostics and timing at the step state.
    double solver_time = 0.0;
    bool failed = false;
    try {
      const auto start = std::chrono::steady_clock::now();
      if (nonholonomic) {
        compute_nonholonomic_action(planner, *robot.constraint, q, v, t);
        if (s.record_timing) solver_time = detail::ElapsedSeconds(start);
        const Vector& pv = qd;
        rec.max_lateral_slip =
            std::max(rec.max_lateral_slip,
                     std::abs(pv[1] * std::cos(q[2]) - pv[0] * std::sin(q[2])));
      } else {
        const PlannerStep st = planner.step(q, v, t);
        if (s.record_timing) solver_time = detail::ElapsedSeconds(start);
        const PowerBalance& pb = st.power;
        rec.max_power =
            std::max(rec.max_power, pb.energy_rate - pb.reference_power);
        const double scale = 1.0 + std::abs(pb.energy_rate) +
                             std::abs(pb.dissipation) +
                             std::abs(pb.reference_power);
        rec.max_balance_residual =
            std::max(rec.max_balance_residual, std::abs(pb.residual()) / scale);
        rec.max_rel_solve_residual =
            std::max(rec.max_rel_solve_residual, st.residual);
      }
    } catch (const Error& e) {
      failed = true;
      rec.numeric_failure = true;
      rec.failure = e.what();
    }

    rec.t.push_back(t);
    rec.q.push_back(q);
    rec.qdot.push_back(v);
    rec.x_ee.push_back(ee.x);
    rec.min_dist.push_back(min_obstacle_distance(s, robot, q, t));
    rec.solver_time.push_back(solver_time);

    if (rec.min_dist.back() <= 0.0 ||
        min_barrier_coordinate(planner, q, qd, t) <= 0.0) {
      rec.collided = true;
      break;
    }
    if (failed) break;

    // Terminal flags.
    const double speed = v.norm();
    if (!rec.goal_reached) {
      double rel_speed = speed;
      if (s.goal_kind == GoalKind::kAnalytic) {
        rel_speed = (ee.xdot - s.goal(t).xdot).norm();
      }
      if ((ee.x - s.goal_position(t)).norm() < s.goal_tolerance &&
          rel_speed < kGoalSpeed) {
        rec.goal_reached = true;
        rec.time_to_goal = t;
      }
    }
    if (speed < kDeadlockSpeed) {
      if (still_since < 0.0) still_since = t;
      if (!rec.goal_reached && t - still_since >= kDeadlockWindow - 1e-9) {
        rec.deadlocked = true;
      }
    } else {
      still_since = -1.0;
    }

    if (i == steps) break;
    try {
      y = rk4_step(dynamics, y, t, s.dt);
      if (nonholonomic) y[2] = wrap_angle(y[2]);
    } catch (const Error& e) {
      rec.numeric_failure = true;
      rec.failure = e.what();
      break;
    }
  }
  return rec;
}

struct RunResult {
  std::size_t instance = 0;  // batch instance index
  std::size_t initial = 0;   // initial-state index within the instance
  RunRecord record;
  Metrics metrics;
};

// Runs every (scenario, initial state) pair on `jobs` workers. Results are
// returned in input order regardless of scheduling.
inline std::vector<RunResult> run_batch(const std::vector<Scenario>& scenarios,
                                        int jobs = 1) {
  struct Task {
    std::size_t instance;
    std::size_t initial;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    for (std::size_t j = 0; j < scenarios[i].initial_states.size(); ++j) {
      tasks.push_back({i, j});
    }
  }
  std::vector<RunResult> results(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t idx = next++; idx < tasks.size(); idx = next++) {
      const Task& task = tasks[idx];
      const Scenario& s = scenarios[task.instance];
      try {
        RunResult r;
        r.instance = task.instance;
        r.initial = task.initial;
        r.record = run_single(s, s.initial_states[task.initial]);
        r.metrics = compute_metrics(r.record, s);
        results[idx] = std::move(r);
      } catch (...) {
        errors[idx] = std::current_exception();
      }
    }
  };
  const int workers =
      std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

inline std::vector<RunResult> run_scenario(const Scenario& s, int jobs = 1) {
  return run_batch({s}, jobs);
}

struct BatchSummary {
  std::size_t runs = 0;
  std::size_t successes = 0;
  std::size_t collisions = 0;
  std::size_t deadlocks = 0;
  std::size_t numeric_failures = 0;
  double success_rate = 0.0;
  double mean_clearance = 0.0;
  double min_clearance = std::numeric_limits<double>::infinity();
  double mean_path_length = 0.0;
  double mean_summed_error = 0.0;
  double mean_solver_time = 0.0;
  std::optional<double> mean_time_to_goal;
};

inline BatchSummary summarize(const std::vector<RunResult>& results) {
  BatchSummary b;
  b.runs = results.size();
  double ttg = 0.0;
  std::size_t ttg_count = 0;
  for (const RunResult& r : results) {
    b.successes += r.metrics.success;
    b.collisions += r.record.collided;
    b.deadlocks += r.record.deadlocked;
    b.numeric_failures += r.record.numeric_failure;
    b.mean_clearance += r.metrics.clearance;
    b.min_clearance = std::min(b.min_clearance, r.metrics.clearance);
    b.mean_path_length += r.metrics.path_length;
    b.mean_summed_error += r.metrics.summed_error;
    b.mean_solver_time += r.metrics.solver_time;
    if (r.metrics.time_to_goal) {
      ttg += *r.metrics.time_to_goal;
      ++ttg_count;
    }
  }
  if (b.runs > 0) {
    const double n = static_cast<double>(b.runs);
    b.success_rate = static_cast<double>(b.successes) / n;
    b.mean_clearance /= n;
    b.mean_path_length /= n;
    b.mean_summed_error /= n;
    b.mean_solver_time /= n;
  }
  if (ttg_count > 0) b.mean_time_to_goal = ttg / static_cast<double>(ttg_count);
  return b;
}

}  // namespace dynfab

#endif  // DYNFAB_SIM_HPP_
