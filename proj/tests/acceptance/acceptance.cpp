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


// Acceptance report: one PASS/FAIL line per criterion. Exits nonzero when
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dynfab/dynfab.hpp"
#include "support/properties.hpp"
#include "support/test_support.hpp"

namespace {

using namespace dynfab;
using dynfab::testing::MaxAbs;
using dynfab::testing::RandomScalar;
using dynfab::testing::RandomVector;

int g_failures = 0;

void Report(const char* id, bool pass, const std::string& text) {
  std::printf("[%s] %-3s %s\n", pass ? "PASS" : "FAIL", id, text.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string Fmt(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

struct Batch {
  std::vector<Scenario> instances;
  std::vector<RunResult> results;
  BatchSummary summary;
  double wall_seconds = 0.0;
};

// Runs a built-in scenario in the given planner mode, caching the result.
const Batch& RunBuiltin(const std::string& name, PlannerMode mode) {
  static std::map<std::pair<std::string, PlannerMode>, Batch> cache;
  const auto key = std::make_pair(name, mode);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  ScenarioConfig cfg = parse_config(*builtin_document(name));
  cfg.base.mode = mode;
  Batch b;
  b.instances = expand_batch(cfg);
  const auto start = std::chrono::steady_clock::now();
  b.results = run_batch(b.instances, 1);
  b.wall_seconds = Seconds(start);
  b.summary = summarize(b.results);
  return cache.emplace(key, std::move(b)).first->second;
}

PlannerMode DefaultMode(const std::string& name) {
  return parse_config(*builtin_document(name)).base.mode;
}

void PropertySuite() {
  const auto start = std::chrono::steady_clock::now();
  const auto homog = dynfab::testing::GeometryHomogeneity(101);
  Report("1a", homog.max_error < 1e-9,
         Fmt("geometry homogeneity: max rel err %.2e over %d samples (tol 1e-9)",
             homog.max_error, homog.samples));
  const auto c2 = dynfab::testing::EnergizationPullbackCommutation(2, 102);
  const auto c3 = dynfab::testing::EnergizationPullbackCommutation(3, 103);
  const double c = std::max(c2.max_error, c3.max_error);
  Report("1b", c < 1e-8,
         Fmt("energization/pullback commutation, 2- and 3-link arms: max "
             "|dqdd| %.2e over %d states (tol 1e-8)",
             c, c2.samples + c3.samples));
  const auto dp = dynfab::testing::DynamicPullbackCommutation(104);
  Report("1c", dp.max_error < 1e-8,
         Fmt("Euler-Lagrange/dynamic pullback commutation: max |dxdd| %.2e "
             "over %d states (tol 1e-8)",
             dp.max_error, dp.samples));
  const auto rate = dynfab::testing::DynamicEnergyRate(105);
  const double drift = dynfab::testing::DynamicEnergyDrift();
  Report("1d", rate.max_error < 1e-10 && drift < 1e-3,
         Fmt("dynamic energy conservation: max |dH/dt| %.2e (tol 1e-10), "
             "10 s RK4 relative drift %.2e (tol 1e-3)",
             rate.max_error, drift));
  const double elapsed = Seconds(start);
  Report("1", elapsed < 10.0,
         Fmt("property suite runtime %.2f s (limit 10 s)", elapsed));
}

void DampedMonotonicity() {
  double worst_power = -1e300;
  double worst_residual = 0.0;
  std::string worst_name;
  std::size_t runs = 0;
  for (const BuiltinScenario& b : builtin_scenarios()) {
    const std::string name(b.name);
    for (PlannerMode mode : {PlannerMode::kStatic, PlannerMode::kDynamic}) {
      const Batch& batch = RunBuiltin(name, mode);
      for (const RunResult& r : batch.results) {
        if (batch.instances[r.instance].robot.type == RobotType::kDiffDrive) {
          continue;
        }
        ++runs;
        if (r.record.max_power > worst_power) {
          worst_power = r.record.max_power;
          worst_name = name + "/" + to_string(mode);
        }
        worst_residual = std::max(worst_residual, r.record.max_balance_residual);
      }
    }
  }
  Report("1e", worst_power <= 1e-9 && worst_residual <= 1e-9,
         Fmt("damped monotonicity over %zu holonomic runs of every shipped "
             "scenario in both modes: max dH/dt net of reference work %.2e "
             "(%s, tol 1e-9), max balance residual %.2e (tol 1e-9)",
             runs, worst_power, worst_name.c_str(), worst_residual));
}

void PointOneObstacle() {
  const Batch& b = RunBuiltin("point-1obs", PlannerMode::kStatic);
  const bool pass = b.summary.successes == 10 && b.summary.runs == 10 &&
                    b.summary.min_clearance > 0.0 && b.wall_seconds < 5.0;
  Report("2", pass,
         Fmt("point, 1 obstacle, static: %zu/%zu reached goal, min clearance "
             "%.3f > 0, runtime %.2f s < 5 s",
             b.summary.successes, b.summary.runs, b.summary.min_clearance,
             b.wall_seconds));
}

void PointTwoObstacles() {
  const Batch& st = RunBuiltin("point-2obs", PlannerMode::kStatic);
  const Batch& dy = RunBuiltin("point-spline", PlannerMode::kDynamic);
  const bool pass = st.summary.deadlocks >= 1 && st.summary.collisions == 0 &&
                    dy.summary.successes == 10 && dy.summary.runs == 10;
  Report("3", pass,
         Fmt("point, 2 obstacles: static %zu deadlocks (>= 1), %zu collisions "
             "(0); dynamic with spline guidance %zu/%zu success",
             st.summary.deadlocks, st.summary.collisions, dy.summary.successes,
             dy.summary.runs));
}

void ObstructedSpline() {
  const Batch& b = RunBuiltin("point-obstructed-spline", PlannerMode::kDynamic);
  Report("4", b.summary.collisions == 0 && b.summary.runs == 10,
         Fmt("obstructed spline, dynamic: %zu collisions over %zu headings "
             "(0 required), %zu reached goal",
             b.summary.collisions, b.summary.runs, b.summary.successes));
}

double Ratio(double a, double b) {
  return std::max(a, b) / std::max(std::min(a, b), 1e-300);
}

void TrajectoryFollowing() {
  const Batch& dy = RunBuiltin("point-follow", PlannerMode::kDynamic);
  const Batch& st = RunBuiltin("point-follow", PlannerMode::kStatic);
  std::size_t better = 0;
  for (std::size_t i = 0; i < dy.results.size(); ++i) {
    better += dy.results[i].metrics.summed_error <
              st.results[i].metrics.summed_error;
  }
  const double share =
      static_cast<double>(better) / static_cast<double>(dy.results.size());
  const double clearance = Ratio(dy.summary.mean_clearance, st.summary.mean_clearance);
  const double time = Ratio(dy.summary.mean_solver_time, st.summary.mean_solver_time);
  Report("5", share >= 0.9 && clearance <= 2.0 && time <= 2.0,
         Fmt("trajectory following, %zu seeds: dynamic summed error lower in "
             "%zu (%.0f%%, >= 90%%; mean %.3f vs %.3f); clearance %.3f vs %.3f "
             "(ratio %.2f <= 2); solver time %.1f vs %.1f us (ratio %.2f <= 2)",
             dy.results.size(), better, 100.0 * share,
             dy.summary.mean_summed_error, st.summary.mean_summed_error,
             dy.summary.mean_clearance, st.summary.mean_clearance, clearance,
             1e6 * dy.summary.mean_solver_time,
             1e6 * st.summary.mean_solver_time, time));
}

void MovingObstacle() {
  const Batch& dy = RunBuiltin("point-moving-obs", PlannerMode::kDynamic);
  const Batch& st = RunBuiltin("point-moving-obs", PlannerMode::kStatic);
  const bool pass = dy.summary.mean_clearance >= st.summary.mean_clearance &&
                    dy.summary.collisions <= st.summary.collisions;
  Report("6", pass,
         Fmt("moving obstacle, %zu seeds: mean clearance dynamic %.3f vs "
             "static %.3f (>= required); collisions %zu vs %zu (<= required); "
             "success %zu vs %zu",
             dy.results.size(), dy.summary.mean_clearance,
             st.summary.mean_clearance, dy.summary.collisions,
             st.summary.collisions, dy.summary.successes, st.summary.successes));
}

void PlanarFiveLink() {
  const Batch& st = RunBuiltin("planar5", PlannerMode::kStatic);
  const Batch& dy = RunBuiltin("planar5-spline", PlannerMode::kDynamic);
  const RunRecord& s = st.results[0].record;
  const RunRecord& d = dy.results[0].record;
  const bool pass = s.deadlocked && !s.collided && dy.summary.successes == 1;
  Report("7", pass,
         Fmt("planar 5-link: static deadlocked=%d collided=%d (clearance "
             "%.3f); spline-guided dynamic success=%d (time to goal %.2f s)",
             s.deadlocked, s.collided, st.results[0].metrics.clearance,
             dy.results[0].metrics.success,
             d.time_to_goal ? *d.time_to_goal : -1.0));
}

void Nonholonomic() {
  // (a) square, invertible constraint: the least-squares action reproduces
  // the root acceleration exactly.
  const NonholonomicConstraint square(
      2, 2, [](const Vector& pose, const Vector& qdot, double) {
        Matrix J(2, 2);
        J << 1.0 + 0.5 * std::sin(pose[0]), 0.3, -0.2,
            1.0 + 0.1 * pose[1] * pose[1];
        return ConstraintJet{J, Vector(0.1 * qdot.cwiseProduct(qdot))};
      });
  FabricPlanner point(2);
  point.add_leaf(make_attractor(Eigen::Vector2d(-2.0, -1.0), IdentityMap(2)));
  point.add_leaf(make_collision_leaf(
      Obstacle(Vector(Eigen::Vector2d(0.5, 0.0)), 0.8), IdentityMap(2), 0.0));
  std::mt19937_64 rng(8);
  double square_err = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Vector pose = RandomVector(rng, 2, -4.0, 4.0);
    if ((pose - Eigen::Vector2d(0.5, 0.0)).norm() < 1.0) pose[1] += 3.0;
    const Vector u = RandomVector(rng, 2, -1.0, 1.0);
    const NonholonomicStep st =
        compute_nonholonomic_action(point, square, pose, u, 0.0);
    const ConstraintJet cj = square.eval(pose, u, 0.0);
    const Vector exact = cj.J.lu().solve(st.root.qddot - cj.Jdot_qdot);
    square_err = std::max(square_err, MaxAbs(st.qddot - exact));
  }
  Report("8a", square_err < 1e-10,
         Fmt("square constraint vs exact solve: max err %.2e over 100 states "
             "(tol 1e-10)",
             square_err));
  double ls_err = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Matrix A(3, 2);
    A.col(0) = RandomVector(rng, 3, -2.0, 2.0);
    A.col(1) = RandomVector(rng, 3, -2.0, 2.0);
    const Vector b = RandomVector(rng, 3, -2.0, 2.0);
    ls_err = std::max(ls_err, MaxAbs(least_squares_action(A, b).qddot -
                                     dynfab::testing::CramerLeastSquares(A, b)));
  }
  Report("8b", ls_err < 1e-6,
         Fmt("random 3x2 least squares vs normal-equation oracle: max err "
             "%.2e (tol 1e-6)",
             ls_err));
  const Batch& dd = RunBuiltin("diffdrive-goal", PlannerMode::kStatic);
  const RunRecord& r = dd.results[0].record;
  Report("8c", dd.results[0].metrics.success && r.max_lateral_slip < 1e-9,
         Fmt("differential drive: success=%d (time to goal %.2f s), max "
             "lateral slip %.2e (tol 1e-9)",
             dd.results[0].metrics.success,
             r.time_to_goal ? *r.time_to_goal : -1.0, r.max_lateral_slip));
}

// Median wall time of compute_action over the states of a recorded run.
double MedianActionTime(const Batch& b, std::size_t* leaves) {
  const Scenario& s = b.instances[0];
  const RobotModel robot = build_robot(s.robot);
  const FabricPlanner planner = build_planner(s, robot);
  *leaves = planner.leaves().size();
  const RunRecord& r = b.results[0].record;
  std::vector<double> times;
  double sink = 0.0;
  for (int pass = 0; pass < 3; ++pass) {
    for (std::size_t k = 0; k < r.rows(); ++k) {
      const auto start = std::chrono::steady_clock::now();
      const Vector a = planner.compute_action(r.q[k], r.qdot[k], r.t[k]);
      times.push_back(Seconds(start));
      sink += a[0];
    }
  }
  if (!std::isfinite(sink)) std::printf("non-finite action\n");
  std::nth_element(times.begin(), times.begin() + times.size() / 2, times.end());
  return times[times.size() / 2];
}

void Performance() {
  std::size_t arm_leaves = 0;
  std::size_t point_leaves = 0;
  const double arm = MedianActionTime(RunBuiltin("planar5", PlannerMode::kStatic),
                                      &arm_leaves);
  const double pt = MedianActionTime(
      RunBuiltin("point-1obs", PlannerMode::kStatic), &point_leaves);
  Report("9", arm < 1e-3 && arm_leaves >= 10 && pt < 2e-4,
         Fmt("median compute_action: planar 5-link, 2 obstacles, %zu leaves "
             "%.1f us (< 1000 us); point robot, %zu leaves %.1f us (< 200 us)",
             arm_leaves, 1e6 * arm, point_leaves, 1e6 * pt));
}

std::string CsvBytes(const std::vector<Scenario>& instances,
                     const std::vector<RunResult>& results) {
  std::ostringstream os;
  for (const RunResult& r : results) {
    write_csv(os, r.record, instances[r.instance].robot);
  }
  return os.str();
}

void Determinism() {
  std::size_t files = 0;
  std::size_t bytes = 0;
  std::vector<std::string> mismatched;
  for (const BuiltinScenario& b : builtin_scenarios()) {
    ScenarioConfig cfg = parse_config(*builtin_document(b.name));
    cfg.base.record_timing = false;
    cfg.batch.seed = 7;
    const std::vector<Scenario> first = expand_batch(cfg);
    const std::vector<Scenario> second = expand_batch(cfg);
    const std::string a = CsvBytes(first, run_batch(first, 1));
    const std::string c = CsvBytes(second, run_batch(second, 2));
    files += first.size() * first[0].initial_states.size();
    bytes += a.size();
    if (a != c) mismatched.emplace_back(b.name);
  }
  std::string names;
  for (const auto& m : mismatched) names += " " + m;
  Report("10", mismatched.empty(),
         Fmt("determinism: %zu trajectories (%zu bytes) of every built-in "
             "rerun with seed 7 on 1 and 2 workers are byte-identical%s%s",
             files, bytes, mismatched.empty() ? "" : "; mismatch:",
             names.c_str()));
}

}  // namespace

int main() {
  try {
    PropertySuite();
    DampedMonotonicity();
    PointOneObstacle();
    PointTwoObstacles();
    ObstructedSpline();
    TrajectoryFollowing();
    MovingObstacle();
    PlanarFiveLink();
    Nonholonomic();
    Performance();
    Determinism();
  } catch (const std::exception& e) {
    std::printf("[FAIL] error: %s\n", e.what());
    return 1;
  }
  std::printf("%d criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
