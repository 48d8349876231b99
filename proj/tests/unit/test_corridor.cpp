#include <gtest/gtest.h>

#include <optional>
#include <vector>

#include "core/corridor.hpp"

namespace explore {
namespace {

VoxelGrid Solid(const Index3 &dims) {
  VoxelGrid g(Index3::Zero(), dims, 0.3);
  for (int64_t i = 0; i < g.size(); ++i) g.Set(i, VoxelState::kOccupied);
  return g;
}

void ExpectSameHalfspaces(const Polyhedron &a, const Polyhedron &b) {
  ASSERT_EQ(a.halfspaces.size(), b.halfspaces.size());
  for (size_t i = 0; i < a.halfspaces.size(); ++i) {
    EXPECT_NEAR((a.halfspaces[i].normal - b.halfspaces[i].normal).norm(), 0.0,
                1e-12);
    EXPECT_NEAR(a.halfspaces[i].offset, b.halfspaces[i].offset, 1e-12);
  }
}

void ExpectOnlyFreeCenters(const VoxelGrid &g, const Polyhedron &p) {
  int inside = 0;
  for (int64_t i = 0; i < g.size(); ++i) {
    if (!p.Contains(g.Center(i))) continue;
    ++inside;
    EXPECT_EQ(g.Get(i), VoxelState::kFree);
  }
  EXPECT_GT(inside, 0);
}

TEST(BuildCorridor, SingleRowGivesItsBox) {
  VoxelGrid g = Solid(Index3(7, 3, 3));
  std::vector<Index3> row;
  for (int x = 1; x <= 5; ++x) {
    g.Set(Index3(x, 1, 1), VoxelState::kFree);
    row.emplace_back(x, 1, 1);
  }
  const GridPath path = MakeGridPath(g, row);
  const auto polys = BuildCorridor(g, path, 2, 0.1);
  ASSERT_EQ(polys.size(), 1u);
  ExpectSameHalfspaces(
      polys[0], BoxToPolyhedron(g, {Index3(1, 1, 1), Index3(5, 1, 1)}, 0.1));
  ExpectOnlyFreeCenters(g, polys[0]);
}

TEST(BuildCorridor, FreeCubeIsOneBox) {
  VoxelGrid g(Index3::Zero(), Index3(10, 10, 10), 0.3);
  for (int64_t i = 0; i < g.size(); ++i) g.Set(i, VoxelState::kFree);
  const auto path = JpsSearch(g, Index3(1, 1, 1), Index3(8, 8, 8));
  ASSERT_TRUE(path);
  const auto polys = BuildCorridor(g, *path, 2, 0.3);
  ASSERT_EQ(polys.size(), 1u);
  ExpectSameHalfspaces(
      polys[0], BoxToPolyhedron(g, {Index3::Zero(), Index3(9, 9, 9)}, 0.3));
}

TEST(BuildCorridor, LShapeGivesTwoOverlappingBoxes) {
  VoxelGrid g = Solid(Index3(9, 9, 3));
  for (int z = 0; z < 3; ++z) {
    for (int y = 0; y < 9; ++y) {
      for (int x = 0; x < 9; ++x) {
        if (y <= 2 || x >= 6) g.Set(Index3(x, y, z), VoxelState::kFree);
      }
    }
  }
  // down the middle of each arm, as the clearance-aware search would go
  std::vector<Index3> voxels;
  for (int x = 1; x <= 7; ++x) voxels.push_back(Index3(x, 1, 1));
  for (int y = 2; y <= 7; ++y) voxels.push_back(Index3(7, y, 1));
  const auto path = std::optional<GridPath>(MakeGridPath(g, voxels));
  const auto polys = BuildCorridor(g, *path, 2, 0.3);
  ASSERT_EQ(polys.size(), 2u);
  for (const Polyhedron &p : polys) ExpectOnlyFreeCenters(g, p);
  std::vector<Halfspace> both = polys[0].halfspaces;
  both.insert(both.end(), polys[1].halfspaces.begin(),
              polys[1].halfspaces.end());
  EXPECT_FALSE(IsEmpty(both));
  EXPECT_TRUE(polys[0].Contains(path->waypoints.front()));
  EXPECT_TRUE(polys[1].Contains(path->waypoints.back()));
}

TEST(BuildCorridor, BlockedStartIsAnInputError) {
  VoxelGrid g = Solid(Index3(3, 3, 3));
  const GridPath path = MakeGridPath(g, {Index3(1, 1, 1)});
  try {
    BuildCorridor(g, path, 2, 0.3);
    FAIL() << "no throw";
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(SeparatingHyperplane, MidpointMinusRadius) {
  const Halfspace h = SeparatingHyperplane(Vec3(0, 0, 0), Vec3(2, 0, 0), 0.3);
  EXPECT_NEAR((h.normal - Vec3(1, 0, 0)).norm(), 0.0, 1e-15);
  EXPECT_NEAR(h.offset, 0.7, 1e-15);
}

TEST(SeparatingHyperplane, UnbufferedBisector) {
  const Halfspace h = SeparatingHyperplane(Vec3(0, 0, 0), Vec3(0, 0, 2), 0.0);
  EXPECT_NEAR((h.normal - Vec3(0, 0, 1)).norm(), 0.0, 1e-15);
  EXPECT_NEAR(h.offset, 1.0, 1e-15);
}

TEST(SeparatingHyperplane, PairLeavesASlab) {
  const Halfspace mine = SeparatingHyperplane(Vec3(0, 0, 0), Vec3(2, 0, 0), 0.3);
  const Halfspace theirs =
      SeparatingHyperplane(Vec3(2, 0, 0), Vec3(0, 0, 0), 0.3);
  EXPECT_NEAR(mine.Violation(Vec3(0.7, 0, 0)), 0.0, 1e-15);
  EXPECT_NEAR(theirs.Violation(Vec3(1.3, 0, 0)), 0.0, 1e-15);
  EXPECT_NEAR(-(mine.offset + theirs.offset), 0.6, 1e-15);
}

TEST(SeparatingHyperplane, CoincidentIsDegenerate) {
  try {
    SeparatingHyperplane(Vec3(1, 1, 1), Vec3(1, 1, 1), 0.3);
    FAIL() << "no throw";
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateGeometry);
  }
}

Polyhedron UnitBox() {
  VoxelGrid g(Index3(-5, -5, -5), Index3(10, 10, 10), 0.3);
  return BoxToPolyhedron(g, {Index3::Zero(), Index3(9, 9, 9)}, 0.0);
}

TEST(AssembleTimeAware, NoNeighbors) {
  const std::vector<Vec3> own(4, Vec3::Zero());
  const TimeAwareCorridor tac = AssembleTimeAware({UnitBox()}, own, {}, 1e9);
  ASSERT_EQ(tac.steps(), 3);
  for (int k = 0; k < 3; ++k) {
    EXPECT_TRUE(tac.extra[k].empty());
    EXPECT_FALSE(tac.infeasible[k]);
  }
}

TEST(AssembleTimeAware, StaticNeighborAddsOnePlanePerStep) {
  const std::vector<Vec3> own(13, Vec3::Zero());
  NeighborPrediction other;
  other.positions.assign(13, Vec3(2, 0, 0));
  other.d_rad = 0.3;
  const TimeAwareCorridor tac =
      AssembleTimeAware({UnitBox()}, own, {other}, 1e9);
  ASSERT_EQ(tac.steps(), 12);
  for (int k = 0; k < 12; ++k) {
    ASSERT_EQ(tac.extra[k].size(), 1u);
    EXPECT_NEAR((tac.extra[k][0].normal - Vec3(1, 0, 0)).norm(), 0.0, 1e-15);
    EXPECT_NEAR(tac.extra[k][0].offset, 0.7, 1e-15);
  }
}

TEST(AssembleTimeAware, ShiftedIndexAndClampedTail) {
  std::vector<Vec3> own(4, Vec3::Zero());
  NeighborPrediction other;
  other.positions = {Vec3(2, 0, 0), Vec3(3, 0, 0), Vec3(4, 0, 0)};
  const TimeAwareCorridor tac =
      AssembleTimeAware({UnitBox()}, own, {other}, 1e9);
  // step k uses prediction k + 1; the short prediction repeats its last point
  EXPECT_NEAR(tac.extra[0][0].offset, 1.5, 1e-15);
  EXPECT_NEAR(tac.extra[1][0].offset, 2.0, 1e-15);
  EXPECT_NEAR(tac.extra[2][0].offset, 2.0, 1e-15);
}

TEST(AssembleTimeAware, FarNeighborIsIgnored) {
  const std::vector<Vec3> own(5, Vec3::Zero());
  NeighborPrediction other;
  other.positions.assign(5, Vec3(50, 0, 0));
  const TimeAwareCorridor tac =
      AssembleTimeAware({UnitBox()}, own, {other}, 20.0);
  for (const auto &e : tac.extra) EXPECT_TRUE(e.empty());
}

TEST(AssembleTimeAware, EmptyStepIsFlagged) {
  const std::vector<Vec3> own(3, Vec3::Zero());
  NeighborPrediction other;
  other.positions.assign(3, Vec3(0.1, 0, 0));
  other.d_rad = 2.0;
  const TimeAwareCorridor tac =
      AssembleTimeAware({UnitBox()}, own, {other}, 1e9);
  EXPECT_TRUE(tac.infeasible[0]);
}

TEST(IsEmpty, DisjointAndOverlappingBoxes) {
  Halfspace a{Vec3::UnitX(), 1.0}, b{-Vec3::UnitX(), -2.0};
  EXPECT_TRUE(IsEmpty({a, b}));
  b.offset = -0.5;
  EXPECT_FALSE(IsEmpty({a, b}));
}

}  // namespace
}  // namespace explore
