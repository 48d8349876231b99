#include <gtest/gtest.h>

#include "core/planner.hpp"

namespace explore {
namespace {

VoxelGrid FreeLocal() {
  VoxelGrid g(Index3::Zero(), Index3(30, 30, 10), 0.3);
  for (int64_t i = 0; i < g.size(); ++i) g.Set(i, VoxelState::kFree);
  return g;
}

TEST(ShiftedReference, DropsTheFirstAndRepeatsTheLast) {
  std::vector<DiscreteState> ref(4);
  for (int k = 0; k < 4; ++k) ref[k].p = Vec3(k, 0, 0);
  const auto s = ShiftedReference(ref);
  ASSERT_EQ(s.size(), 4u);
  EXPECT_EQ(s[0].p, Vec3(1, 0, 0));
  EXPECT_EQ(s[2].p, Vec3(3, 0, 0));
  EXPECT_EQ(s[3].p, Vec3(3, 0, 0));
}

TEST(PlanIteration, MovesTowardTheGoal) {
  const VoxelGrid g = FreeLocal();
  PlannerParams params;
  PlanRequest req;
  req.local = &g;
  req.start_ms = 500;
  req.x0.p = g.Center(Index3(10, 15, 5));
  req.goal = g.Center(Index3(20, 15, 5));
  const PlanResult r = PlanIteration(params, req);
  ASSERT_EQ(r.outcome, PlanOutcome::kSolved);
  EXPECT_FALSE(r.at_goal);
  EXPECT_FALSE(r.path.empty());
  EXPECT_EQ(r.trajectory.start_ms, 500);
  EXPECT_EQ(r.trajectory.states.front().p, req.x0.p);
  EXPECT_GT(r.trajectory.states.back().p.x(), req.x0.p.x() + 0.1);
  EXPECT_LE(r.trajectory.states.back().v.norm(), 1e-8);
}

TEST(PlanIteration, NoGoalHovers) {
  const VoxelGrid g = FreeLocal();
  PlannerParams params;
  PlanRequest req;
  req.local = &g;
  req.x0.p = g.Center(Index3(10, 15, 5));
  const PlanResult r = PlanIteration(params, req);
  EXPECT_TRUE(r.path.empty());
  for (const DiscreteState &s : r.trajectory.states) {
    EXPECT_LE((s.p - req.x0.p).norm(), 1e-6);
  }
}

TEST(PlanIteration, BlockedStartFallsBack) {
  VoxelGrid g = FreeLocal();
  const Index3 here(10, 15, 5);
  g.Set(here, VoxelState::kOccupied);
  PlannerParams params;
  PlanRequest req;
  req.local = &g;
  req.x0.p = g.Center(here);
  req.goal = g.Center(Index3(20, 15, 5));
  const Trajectory prev = HoverTrajectory(req.x0.p, 0, 100, 12);
  req.previous = &prev;
  req.start_ms = 100;
  const PlanResult r = PlanIteration(params, req);
  EXPECT_EQ(r.outcome, PlanOutcome::kFallback);
  EXPECT_EQ(r.trajectory.start_ms, 100);
}

TEST(PlanIteration, NeighborPlaneIsRespected) {
  const VoxelGrid g = FreeLocal();
  PlannerParams params;
  PlanRequest req;
  req.local = &g;
  req.x0.p = g.Center(Index3(10, 15, 5));
  req.goal = g.Center(Index3(25, 15, 5));
  NeighborPrediction other;
  other.positions.assign(13, req.x0.p + Vec3(1.5, 0, 0));
  other.d_rad = 0.3;
  req.neighbors.push_back(other);
  const PlanResult r = PlanIteration(params, req);
  ASSERT_EQ(r.outcome, PlanOutcome::kSolved);
  for (const DiscreteState &s : r.trajectory.states) {
    EXPECT_LE(s.p.x(), req.x0.p.x() + 0.75 - 0.3 + 1e-9);
  }
}

}  // namespace
}  // namespace explore
