#include <gtest/gtest.h>

#include <random>

#include "core/distance_field.hpp"
#include "verify/oracles.hpp"

namespace explore {
namespace {

VoxelGrid RandomGrid(std::mt19937_64 &rng, const Index3 &dims, double p) {
  std::bernoulli_distribution blocked(p);
  VoxelGrid g(Index3::Zero(), dims, 0.3);
  for (int64_t i = 0; i < g.size(); ++i) {
    g.Set(i, blocked(rng) ? VoxelState::kOccupied : VoxelState::kFree);
  }
  return g;
}

TEST(DistanceField, MatchesBruteForce) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 10; ++t) {
    const VoxelGrid g = RandomGrid(rng, Index3(9, 8, 6), 0.05);
    const DistanceField f = ComputeDistanceField(g);
    const std::vector<double> brute = oracle::BruteDistanceField(g);
    for (int64_t i = 0; i < g.size(); ++i) {
      EXPECT_NEAR(f.At(i), brute[i], 1e-9);
    }
  }
}

TEST(DistanceField, ZeroExactlyOnBlockedVoxels) {
  std::mt19937_64 rng(2);
  VoxelGrid g = RandomGrid(rng, Index3(6, 6, 6), 0.1);
  g.Set(int64_t{7}, VoxelState::kUnknown);
  const DistanceField f = ComputeDistanceField(g);
  for (int64_t i = 0; i < g.size(); ++i) {
    EXPECT_EQ(f.At(i) == 0.0, g.Get(i) != VoxelState::kFree);
  }
}

TEST(DistanceField, NoObstacleMeansInfinity) {
  VoxelGrid g(Index3::Zero(), Index3(3, 3, 3), 0.3);
  for (int64_t i = 0; i < g.size(); ++i) g.Set(i, VoxelState::kFree);
  EXPECT_TRUE(std::isinf(ComputeDistanceField(g).At(0)));
}

TEST(DistanceField, LipschitzAcrossNeighbors) {
  std::mt19937_64 rng(5);
  const VoxelGrid g = RandomGrid(rng, Index3(10, 10, 5), 0.08);
  const DistanceField f = ComputeDistanceField(g);
  for (int64_t i = 0; i < g.size(); ++i) {
    const Index3 a = g.Unlinear(i);
    for (const Index3 &d : NeighborOffsets26()) {
      const Index3 b = a + d;
      if (!g.Contains(b)) continue;
      const double step = d.cast<double>().norm() * g.voxel_size();
      EXPECT_LE(std::abs(f.At(i) - f.At(g.Linear(b))), step + 1e-12);
    }
  }
}

TEST(Inflation, LayersForRadius) {
  EXPECT_EQ(InflationVoxels(0.3, 0.3), 1);
  EXPECT_EQ(InflationVoxels(0.0, 0.3), 0);
  EXPECT_EQ(InflationVoxels(0.6, 0.3), 2);
}

TEST(Traversable, BlocksAroundObstaclesAndGridEdge) {
  VoxelGrid g(Index3::Zero(), Index3(7, 7, 7), 0.3);
  for (int64_t i = 0; i < g.size(); ++i) g.Set(i, VoxelState::kFree);
  g.Set(Index3(3, 3, 3), VoxelState::kOccupied);
  const auto t = ComputeTraversable(g, 1);
  EXPECT_FALSE(t[g.Linear(Index3(0, 3, 3))]);  // touches the outside
  EXPECT_FALSE(t[g.Linear(Index3(2, 2, 2))]);  // corner neighbor
  EXPECT_TRUE(t[g.Linear(Index3(1, 1, 1))]);
  EXPECT_TRUE(t[g.Linear(Index3(5, 3, 3))]);
}

}  // namespace
}  // namespace explore
