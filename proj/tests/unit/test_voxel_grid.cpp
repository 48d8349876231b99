#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "core/voxel_grid.hpp"

namespace explore {
namespace {

TEST(VoxelGrid, StartsUnknown) {
  VoxelGrid g(Index3(2, -1, 0), Index3(3, 4, 5), 0.3);
  EXPECT_EQ(g.size(), 60);
  EXPECT_EQ(g.Count(VoxelState::kUnknown), 60);
}

TEST(VoxelGrid, RejectsBadShape) {
  EXPECT_THROW(VoxelGrid(Index3::Zero(), Index3(0, 1, 1), 0.3), Error);
  EXPECT_THROW(VoxelGrid(Index3::Zero(), Index3(1, 1, 1), 0.0), Error);
}

TEST(VoxelGrid, MisalignedOriginIsAnAlignmentError) {
  try {
    VoxelGrid::FromWorldOrigin(Vec3(0.1, 0, 0), Index3(2, 2, 2), 0.3);
    FAIL() << "no throw";
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), ErrorCode::kAlignment);
  }
  const VoxelGrid g =
      VoxelGrid::FromWorldOrigin(Vec3(0.6, -0.9, 3.0), Index3(2, 2, 2), 0.3);
  EXPECT_EQ(g.origin_index(), Index3(2, -3, 10));
}

TEST(VoxelGrid, IndexAndCoordinateAreInverse) {
  VoxelGrid g(Index3(-3, 2, 1), Index3(4, 5, 3), 0.3);
  for (int64_t i = 0; i < g.size(); ++i) {
    const Index3 idx = g.Unlinear(i);
    EXPECT_EQ(g.Linear(idx), i);
    EXPECT_EQ(g.PointToIndex(g.Center(idx)), idx);
  }
}

TEST(VoxelGrid, OutsideReadsUnknown) {
  VoxelGrid g(Index3::Zero(), Index3(2, 2, 2), 1.0);
  g.Set(Index3(1, 1, 1), VoxelState::kFree);
  EXPECT_EQ(g.GetOr(Index3(1, 1, 1)), VoxelState::kFree);
  EXPECT_EQ(g.GetOr(Index3(2, 1, 1)), VoxelState::kUnknown);
  EXPECT_EQ(g.GetOr(Index3(-1, 0, 0)), VoxelState::kUnknown);
}

TEST(TraverseSegment, VisitsEveryPiercedVoxelInOrder) {
  std::vector<Index3> seen;
  TraverseSegment(Vec3(0.15, 0.15, 0.15), Vec3(1.05, 0.15, 0.15), 0.3,
                  [&](const Index3 &v) {
                    seen.push_back(v);
                    return true;
                  });
  ASSERT_EQ(seen.size(), 4u);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(seen[i], Index3(i, 0, 0));
}

TEST(TraverseSegment, DiagonalStepsOneAxisAtATime) {
  std::vector<Index3> seen;
  TraverseSegment(Vec3(0.1, 0.2, 0.3), Vec3(2.7, 1.9, -0.8), 1.0,
                  [&](const Index3 &v) {
                    seen.push_back(v);
                    return true;
                  });
  EXPECT_EQ(seen.front(), Index3(0, 0, 0));
  EXPECT_EQ(seen.back(), Index3(2, 1, -1));
  EXPECT_EQ(seen.size(), 5u);
  for (size_t i = 1; i < seen.size(); ++i) {
    EXPECT_EQ((seen[i] - seen[i - 1]).cwiseAbs().sum(), 1);
  }
}

TEST(GridSnapshot, RoundTrip) {
  VoxelGrid g(Index3(1, -2, 3), Index3(3, 2, 2), 0.3);
  g.Set(0, VoxelState::kFree);
  g.Set(5, VoxelState::kOccupied);
  const std::string path =
      (std::filesystem::temp_directory_path() / "explore_snapshot.vxgd")
          .string();
  SaveGridSnapshot(g, path);
  EXPECT_EQ(std::filesystem::file_size(path), 4u + 4 + 24 + 12 + 8 + 12);
  const VoxelGrid back = LoadGridSnapshot(path);
  EXPECT_TRUE(back == g);
  std::filesystem::remove(path);
}

TEST(GridSnapshot, RejectsGarbage) {
  const std::string path =
      (std::filesystem::temp_directory_path() / "explore_bad.vxgd").string();
  {
    std::ofstream out(path, std::ios::binary);
    out << "NOPE and some more bytes";
  }
  EXPECT_THROW(LoadGridSnapshot(path), Error);
  std::filesystem::remove(path);
  EXPECT_THROW(LoadGridSnapshot(path), Error);
}

}  // namespace
}  // namespace explore
