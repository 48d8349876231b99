#include <gtest/gtest.h>

#include <random>

#include "core/path_search.hpp"
#include "verify/oracles.hpp"

namespace explore {
namespace {

VoxelGrid Free(const Index3 &dims) {
  VoxelGrid g(Index3::Zero(), dims, 0.3);
  for (int64_t i = 0; i < g.size(); ++i) g.Set(i, VoxelState::kFree);
  return g;
}

std::vector<uint8_t> FreeMask(const VoxelGrid &g) {
  std::vector<uint8_t> m(g.size());
  for (int64_t i = 0; i < g.size(); ++i) m[i] = g.Get(i) == VoxelState::kFree;
  return m;
}

void ExpectAdjacentAndFree(const VoxelGrid &g, const GridPath &p) {
  for (size_t i = 0; i < p.voxels.size(); ++i) {
    EXPECT_EQ(g.Get(p.voxels[i]), VoxelState::kFree);
    if (i > 0) {
      EXPECT_EQ((p.voxels[i] - p.voxels[i - 1]).cwiseAbs().maxCoeff(), 1);
    }
  }
}

TEST(Jps, StartIsGoal) {
  const VoxelGrid g = Free(Index3(4, 4, 4));
  const auto p = JpsSearch(g, Index3(1, 2, 3), Index3(1, 2, 3));
  ASSERT_TRUE(p);
  EXPECT_EQ(p->waypoints.size(), 1u);
  EXPECT_EQ(p->length, 0.0);
}

TEST(Jps, OpenPlaneDiagonal) {
  const VoxelGrid g = Free(Index3(10, 10, 1));
  const auto p = JpsSearch(g, Index3(0, 0, 0), Index3(9, 9, 0));
  const auto d = oracle::DijkstraSteps(g, FreeMask(g), Index3(0, 0, 0),
                                       Index3(9, 9, 0));
  ASSERT_TRUE(p && d);
  EXPECT_EQ(p->steps, *d);
  EXPECT_DOUBLE_EQ(p->length, d->Length(0.3));
  ExpectAdjacentAndFree(g, *p);
}

TEST(Jps, EnclosedGoalHasNoPath) {
  VoxelGrid g = Free(Index3(7, 7, 1));
  for (int y = 2; y <= 4; ++y)
    for (int x = 2; x <= 4; ++x)
      if (x != 3 || y != 3) g.Set(Index3(x, y, 0), VoxelState::kOccupied);
  EXPECT_FALSE(JpsSearch(g, Index3(0, 0, 0), Index3(3, 3, 0)));
}

TEST(Jps, StartNotFreeIsAnInputError) {
  VoxelGrid g = Free(Index3(3, 3, 3));
  g.Set(int64_t{0}, VoxelState::kUnknown);
  EXPECT_THROW(JpsSearch(g, Index3(0, 0, 0), Index3(2, 2, 2)), Error);
}

TEST(Jps, EqualsDijkstraOnRandomGrids) {
  std::mt19937_64 rng(21);
  std::bernoulli_distribution blocked(0.1);
  for (int t = 0; t < 15; ++t) {
    VoxelGrid g(Index3::Zero(), Index3(12, 12, 12), 0.3);
    for (int64_t i = 0; i < g.size(); ++i) {
      g.Set(i, blocked(rng) ? VoxelState::kOccupied : VoxelState::kFree);
    }
    const Index3 s(0, 0, 0), e(11, 11, 11);
    g.Set(s, VoxelState::kFree);
    g.Set(e, VoxelState::kFree);
    const auto p = JpsSearch(g, s, e);
    const auto d = oracle::DijkstraSteps(g, FreeMask(g), s, e);
    ASSERT_EQ(p.has_value(), d.has_value());
    if (!p) continue;
    EXPECT_EQ(p->steps, *d);
    ExpectAdjacentAndFree(g, *p);
  }
}

TEST(Dmp, NoPenaltyKeepsTheJpsPath) {
  const VoxelGrid g = Free(Index3(10, 10, 3));
  const DistanceField f = ComputeDistanceField(g);
  const auto jps = JpsSearch(g, Index3(0, 0, 1), Index3(9, 6, 1));
  ASSERT_TRUE(jps);
  const GridPath dmp = DmpPush(g, FreeMask(g), f, *jps, 0.6, 10.0);
  EXPECT_EQ(dmp.voxels, jps->voxels);
}

TEST(Dmp, WallGapIsCrossedWithClearance) {
  VoxelGrid g = Free(Index3(15, 15, 1));
  for (int y = 0; y < 15; ++y) {
    if (y < 4 || y > 10) g.Set(Index3(7, y, 0), VoxelState::kOccupied);
  }
  const DistanceField f = ComputeDistanceField(g);
  const auto mask = FreeMask(g);
  const Index3 s(2, 7, 0), e(12, 1, 0);
  const auto jps = JpsSearch(g, s, e);
  ASSERT_TRUE(jps);
  const GridPath dmp = DmpPush(g, mask, f, *jps, 0.6, 10.0);
  const auto best = oracle::PenalizedDijkstra(g, mask, f, s, e, 0.6, 10.0);
  ASSERT_TRUE(best);
  EXPECT_NEAR(PenalizedCost(g, f, dmp.voxels, 0.6, 10.0), *best, 1e-9);
  ExpectAdjacentAndFree(g, dmp);
  for (const Index3 &v : dmp.voxels) EXPECT_GE(f.At(g.Linear(v)), 0.6 - 1e-12);
}

TEST(Dmp, NarrowCorridorStillFindsAPath) {
  VoxelGrid g(Index3::Zero(), Index3(7, 3, 1), 0.3);
  for (int64_t i = 0; i < g.size(); ++i) g.Set(i, VoxelState::kOccupied);
  for (int x = 0; x < 7; ++x) g.Set(Index3(x, 1, 0), VoxelState::kFree);
  const DistanceField f = ComputeDistanceField(g);
  const auto jps = JpsSearch(g, Index3(0, 1, 0), Index3(6, 1, 0));
  ASSERT_TRUE(jps);
  const GridPath dmp = DmpPush(g, FreeMask(g), f, *jps, 0.6, 10.0);
  EXPECT_EQ(dmp.voxels.size(), 7u);
  EXPECT_LT(f.At(g.Linear(dmp.voxels[3])), 0.6);
}

TEST(Reachable, AllFree) {
  const VoxelGrid g = Free(Index3(5, 5, 5));
  const auto r = ReachableSet(g, {Index3(2, 2, 2)}, 0);
  EXPECT_EQ(std::count(r.begin(), r.end(), 1), g.size());
}

TEST(Reachable, WallSplitsChambers) {
  VoxelGrid g = Free(Index3(7, 4, 4));
  for (int z = 0; z < 4; ++z)
    for (int y = 0; y < 4; ++y) g.Set(Index3(3, y, z), VoxelState::kOccupied);
  const auto r = ReachableSet(g, {Index3(0, 0, 0)}, 0);
  EXPECT_TRUE(r[g.Linear(Index3(2, 3, 3))]);
  EXPECT_FALSE(r[g.Linear(Index3(4, 0, 0))]);
}

TEST(Reachable, BlockedSeedMovesOrDrops) {
  VoxelGrid g = Free(Index3(7, 7, 7));
  g.Set(Index3(3, 3, 3), VoxelState::kOccupied);
  const auto moved = ReachableSet(g, {Index3(3, 3, 3)}, 0);
  EXPECT_GT(std::count(moved.begin(), moved.end(), 1), 0);
  VoxelGrid solid(Index3::Zero(), Index3(7, 7, 7), 0.3);
  for (int64_t i = 0; i < solid.size(); ++i) {
    solid.Set(i, VoxelState::kOccupied);
  }
  solid.Set(Index3(0, 0, 0), VoxelState::kFree);
  const auto r = ReachableSet(solid, {Index3(5, 5, 5)}, 0);
  EXPECT_EQ(std::count(r.begin(), r.end(), 1), 0);
}

TEST(Reachable, GrowsWithFreeSpace) {
  std::mt19937_64 rng(4);
  VoxelGrid g(Index3::Zero(), Index3(10, 10, 4), 0.3);
  for (int64_t i = 0; i < g.size(); ++i) {
    g.Set(i, rng() % 4 == 0 ? VoxelState::kOccupied : VoxelState::kFree);
  }
  g.Set(int64_t{0}, VoxelState::kFree);
  const auto before = ReachableSet(g, {Index3(0, 0, 0)}, 0);
  for (int64_t i = 0; i < g.size(); i += 7) g.Set(i, VoxelState::kFree);
  const auto after = ReachableSet(g, {Index3(0, 0, 0)}, 0);
  for (int64_t i = 0; i < g.size(); ++i) {
    if (before[i]) EXPECT_TRUE(after[i]);
  }
}

TEST(IntermediateGoal, InsideIsIdentity) {
  const VoxelGrid g = Free(Index3(20, 20, 10));
  const auto v =
      IntermediateGoal(g, g.Center(Index3(10, 10, 5)), g.Center(Index3(3, 4, 5)));
  ASSERT_TRUE(v);
  EXPECT_EQ(*v, Index3(3, 4, 5));
}

TEST(IntermediateGoal, FarGoalLandsOneVoxelInsideTheFace) {
  const VoxelGrid g = Free(Index3(20, 20, 10));
  const Vec3 agent = g.Center(Index3(10, 10, 5));
  const auto v = IntermediateGoal(g, agent, agent + Vec3(100, 0, 0));
  ASSERT_TRUE(v);
  EXPECT_EQ(*v, Index3(18, 10, 5));
}

TEST(IntermediateGoal, BlockedExitSnapsToNearestFree) {
  VoxelGrid g = Free(Index3(20, 20, 10));
  g.Set(Index3(18, 10, 5), VoxelState::kOccupied);
  const Vec3 agent = g.Center(Index3(10, 10, 5));
  const auto v = IntermediateGoal(g, agent, agent + Vec3(100, 0, 0));
  ASSERT_TRUE(v);
  // brute force: closest free voxel center, lowest index on ties
  const Vec3 target = g.Center(Index3(18, 10, 5));
  int64_t best = -1;
  double best_d = 1e18;
  for (int64_t i = 0; i < g.size(); ++i) {
    if (g.Get(i) != VoxelState::kFree) continue;
    const double d = (g.Center(i) - target).squaredNorm();
    if (d < best_d - 1e-12) {
      best_d = d;
      best = i;
    }
  }
  EXPECT_EQ(g.Linear(*v), best);
}

}  // namespace
}  // namespace explore
