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


#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>

#include "dynfab/dynfab.hpp"
#include "support/test_support.hpp"

namespace dynfab {
namespace {

using testing::CramerLeastSquares;
using testing::MaxAbs;
using testing::RandomScalar;
using testing::RandomVector;

FabricPlanner PointPlanner(const ReferenceTrajectory& goal,
                           EnergizationSite site = EnergizationSite::kRoot,
                           bool obstacles = true) {
  FabricPlanner p(2, PlannerOptions{DampingParams{2.5}, site});
  const DifferentialMap id = IdentityMap(2);
  p.add_leaf(make_attractor(goal, id));
  if (obstacles) {
    p.add_leaf(make_collision_leaf(Obstacle(Vector(Eigen::Vector2d(0.5, 0.0)), 0.8),
                                   id, 0.0));
    p.add_leaf(make_collision_leaf(
        Obstacle(SinusoidLineReference(Vector::Zero(2),
                                       Eigen::Vector2d(0.0, -2.5), 1.0, 0.0),
                 0.6),
        id, 0.0));
  }
  for (int i = 0; i < 2; ++i) {
    auto [lo, hi] = make_limit_leaf(2, i, -5.0, 5.0);
    p.add_leaf(std::move(lo));
    p.add_leaf(std::move(hi));
  }
  return p;
}

// Random state away from both obstacles, inside the workspace.
Vector FreePoint(std::mt19937_64& rng, double t) {
  for (;;) {
    const Vector x = RandomVector(rng, 2, -4.5, 4.5);
    const Vector moving = Eigen::Vector2d(0.0, -2.5 * std::cos(t));
    if ((x - Eigen::Vector2d(0.5, 0.0)).norm() > 1.0 &&
        (x - moving).norm() > 0.8) {
      return x;
    }
  }
}

TEST(FabricPlanner, RootSolveResidual) {
  std::mt19937_64 rng(1);
  const FabricPlanner p = PointPlanner(ConstantReference(Eigen::Vector2d(-2.0, -1.0)));
  for (int trial = 0; trial < 100; ++trial) {
    const double t = RandomScalar(rng, 0.0, 10.0);
    const Vector q = FreePoint(rng, t);
    const Vector qdot = RandomVector(rng, 2, -1.5, 1.5);
    const PlannerStep st = p.step(q, qdot, t);
    EXPECT_FALSE(st.collision);
    EXPECT_LT(st.residual, 1e-12);
    EXPECT_LT(MaxAbs(st.qddot - p.compute_action(q, qdot, t)), 1e-15);
  }
}

TEST(FabricPlanner, SingleAttractorMatchesManualAssembly) {
  const Vector goal = Eigen::Vector2d(1.0, -0.5);
  FabricPlanner p(2, PlannerOptions{DampingParams{3.0}});
  const AttractorParams ap;
  p.add_leaf(make_attractor(goal, IdentityMap(2), ap));
  const Vector q = Eigen::Vector2d(-0.4, 0.7);
  const Vector qdot = Eigen::Vector2d(0.3, 0.2);
  const LagrangianTerms lag =
      AttractorMetricEnergy(2, ap.m_upper, ap.m_lower, ap.alpha_metric)
          .eval(q - goal, qdot);
  const Vector grad = SmoothedNormPotential(2, ap.k, ap.alpha_psi)(q - goal).grad;
  const Matrix M = lag.M + Matrix::Identity(2, 2);
  const Vector expected = -M.ldlt().solve(lag.f + grad + 3.0 * qdot);
  const PlannerStep st = p.step(q, qdot, 0.0);
  EXPECT_LT(MaxAbs(st.qddot - expected), 1e-13);
  // Without geometries the root energization has nothing to correct.
  EXPECT_NEAR(st.alpha, 0.0, 1e-15);
}

TEST(FabricPlanner, DynamicallyUnbiasedOnTheReference) {
  // Exactly on a moving goal the planner reproduces the goal acceleration.
  const ReferenceTrajectory goal =
      CircleReference(Vector::Zero(2), 4.0, 0.2, std::numbers::pi / 2.0);
  FabricPlanner p(2);
  p.add_leaf(make_attractor(goal, IdentityMap(2)));
  for (double t : {0.0, 1.3, 7.7}) {
    const ReferenceSample s = goal(t);
    const Vector qddot = p.compute_action(s.x, s.xdot, t);
    EXPECT_LT(MaxAbs(qddot - s.xddot), 1e-12) << "t=" << t;
  }
  // A planner that treats the goal as momentarily at rest brakes instead.
  FabricPlanner frozen(2);
  frozen.add_leaf(make_attractor(Frozen(goal), IdentityMap(2)));
  const ReferenceSample s = goal(1.3);
  EXPECT_GT(MaxAbs(frozen.compute_action(s.x, s.xdot, 1.3) - s.xddot), 0.1);
}

TEST(FabricPlanner, PowerBalanceCloses) {
  std::mt19937_64 rng(2);
  const ReferenceTrajectory goals[] = {
      ConstantReference(Eigen::Vector2d(-2.0, -1.0)),
      CircleReference(Vector::Zero(2), 4.0, 0.2, std::numbers::pi / 2.0)};
  for (const ReferenceTrajectory& goal : goals) {
    for (EnergizationSite site : {EnergizationSite::kRoot, EnergizationSite::kLeaf}) {
      const FabricPlanner p = PointPlanner(goal, site);
      for (int trial = 0; trial < 100; ++trial) {
        const double t = RandomScalar(rng, 0.0, 10.0);
        const Vector q = FreePoint(rng, t);
        const Vector qdot = RandomVector(rng, 2, -1.5, 1.5);
        const PowerBalance pb = p.step(q, qdot, t).power;
        const double scale = 1.0 + std::abs(pb.energy_rate) +
                             std::abs(pb.dissipation) +
                             std::abs(pb.reference_power);
        EXPECT_LT(std::abs(pb.residual()) / scale, 1e-12);
        if (site == EnergizationSite::kRoot) {
          EXPECT_LT(std::abs(pb.energization_power) / scale, 1e-12);
        }
      }
    }
  }
}

TEST(FabricPlanner, DampedEnergyDecreasesWithStaticReferences) {
  std::mt19937_64 rng(3);
  const FabricPlanner p = PointPlanner(
      ConstantReference(Eigen::Vector2d(-2.0, -1.0)), EnergizationSite::kRoot,
      false);
  FabricPlanner with_obstacle(2);
  with_obstacle.add_leaf(make_attractor(Eigen::Vector2d(-2.0, -1.0), IdentityMap(2)));
  with_obstacle.add_leaf(make_collision_leaf(
      Obstacle(Vector(Eigen::Vector2d(0.5, 0.0)), 0.8), IdentityMap(2), 0.0));
  const std::array<const FabricPlanner*, 2> planners{&p, &with_obstacle};
  for (const FabricPlanner* planner : planners) {
    for (int trial = 0; trial < 100; ++trial) {
      Vector q = RandomVector(rng, 2, -4.5, 4.5);
      if ((q - Eigen::Vector2d(0.5, 0.0)).norm() < 1.0) q[1] += 3.0;
      const Vector qdot = RandomVector(rng, 2, -1.5, 1.5);
      const PowerBalance pb = planner->step(q, qdot, 0.0).power;
      EXPECT_NEAR(pb.reference_power, 0.0, 1e-12);
      EXPECT_NEAR(pb.energy_rate, -pb.dissipation,
                  1e-12 * (1.0 + pb.dissipation));
      EXPECT_LE(pb.energy_rate, 1e-9);
    }
  }
}

TEST(FabricPlanner, ReportsCollisionAndBarrierMinimum) {
  const FabricPlanner p = PointPlanner(ConstantReference(Vector::Zero(2)));
  const PlannerStep inside =
      p.step(Eigen::Vector2d(0.6, 0.1), Eigen::Vector2d(0.1, 0.0), 0.0);
  EXPECT_TRUE(inside.collision);
  EXPECT_LE(inside.min_barrier, 0.0);
  const PlannerStep clear =
      p.step(Eigen::Vector2d(3.0, 3.0), Eigen::Vector2d(0.1, 0.0), 0.0);
  EXPECT_FALSE(clear.collision);
  EXPECT_GT(clear.min_barrier, 0.0);
}

TEST(FabricPlanner, ValidatesLeaves) {
  FabricPlanner p(2);
  EXPECT_THROW(p.step(Vector::Zero(2), Vector::Zero(2), 0.0), ContractError);
  Leaf bad = make_attractor(Vector(Vector::Zero(2)), IdentityMap(2));
  bad.potential.reset();
  EXPECT_THROW(p.add_leaf(bad), ContractError);
  Leaf limit = make_limit_leaf(2, 0, -1.0, 1.0).first;
  limit.potential = SmoothedNormPotential(1, 1.0, 1.0);
  EXPECT_THROW(p.add_leaf(limit), ContractError);
  EXPECT_THROW(p.add_leaf(make_limit_leaf(3, 0, -1.0, 1.0).first), ContractError);
  EXPECT_THROW(FabricPlanner(0), ContractError);
  EXPECT_THROW(FabricPlanner(2, PlannerOptions{DampingParams{0.0}}), ContractError);
}

TEST(LeastSquares, MatchesCramerOracle) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    Matrix A(3, 2);
    A.col(0) = RandomVector(rng, 3, -2.0, 2.0);
    A.col(1) = RandomVector(rng, 3, -2.0, 2.0);
    const Vector b = RandomVector(rng, 3, -2.0, 2.0);
    const LeastSquaresResult r = least_squares_action(A, b);
    EXPECT_LT(MaxAbs(r.qddot - CramerLeastSquares(A, b)), 1e-6);
    EXPECT_NEAR(r.residual, (A * r.qddot + b).norm(), 1e-12);
  }
  EXPECT_THROW(least_squares_action(Matrix::Zero(3, 2), Vector::Ones(3)),
               SolveError);
}

TEST(Nonholonomic, SquareConstraintMatchesExactSolve) {
  const NonholonomicConstraint square(
      2, 2, [](const Vector& pose, const Vector& qdot, double) {
        Matrix J(2, 2);
        J << 1.0 + 0.5 * std::sin(pose[0]), 0.3, -0.2, 1.0 + 0.1 * pose[1] * pose[1];
        return ConstraintJet{J, Vector(0.1 * qdot.cwiseProduct(qdot))};
      });
  std::mt19937_64 rng(5);
  const FabricPlanner p = PointPlanner(ConstantReference(Eigen::Vector2d(-2.0, -1.0)));
  for (int trial = 0; trial < 50; ++trial) {
    const double t = RandomScalar(rng, 0.0, 10.0);
    const Vector pose = FreePoint(rng, t);
    const Vector u = RandomVector(rng, 2, -1.0, 1.0);
    const NonholonomicStep st =
        compute_nonholonomic_action(p, square, pose, u, t);
    const ConstraintJet cj = square.eval(pose, u, t);
    const Vector pose_ddot = cj.J * st.qddot + cj.Jdot_qdot;
    EXPECT_LT(MaxAbs(pose_ddot - st.root.qddot), 1e-10);
    EXPECT_LT(st.residual, 1e-10 * (1.0 + MaxAbs(st.root.root.f())));
  }
}

TEST(Nonholonomic, DiffDriveLeastSquaresMatchesOracle) {
  std::mt19937_64 rng(6);
  FabricPlanner p(3);
  p.add_leaf(make_attractor(Eigen::Vector2d(2.5, 2.0), diffdrive_point_map(0.2)));
  const NonholonomicConstraint c = diffdrive_constraint();
  for (int trial = 0; trial < 50; ++trial) {
    Vector pose(3);
    pose << RandomVector(rng, 2, -3.0, 3.0), RandomScalar(rng, -3.0, 3.0);
    const Vector u = RandomVector(rng, 2, -1.0, 1.0);
    const NonholonomicStep st = compute_nonholonomic_action(p, c, pose, u, 0.0);
    const ConstraintJet cj = c.eval(pose, u, 0.0);
    const Matrix& M = st.root.root.M();
    const Vector oracle =
        CramerLeastSquares(M * cj.J, M * cj.Jdot_qdot + st.root.root.f());
    EXPECT_LT(MaxAbs(st.qddot - oracle), 1e-6);
  }
}

}  // namespace
}  // namespace dynfab
