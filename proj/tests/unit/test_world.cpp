#include <gtest/gtest.h>

#include <filesystem>

#include "core/world.hpp"

namespace explore {
namespace {

WorldParams Params(double size, double density) {
  WorldParams p;
  p.size = Vec3(size, size, 3.0);
  p.density = density;
  return p;
}

TEST(GenerateWorld, CylinderCountFromDensity) {
  const auto starts = StartPositions(4, 0.3);
  EXPECT_EQ(GenerateWorld(1, Params(30, 0.1), starts).cylinders.size(), 90u);
  EXPECT_TRUE(GenerateWorld(1, Params(30, 0.0), starts).cylinders.empty());
}

TEST(GenerateWorld, SameSeedSameWorld) {
  const auto starts = StartPositions(2, 0.3);
  const WorldModel a = GenerateWorld(5, Params(15, 0.1), starts);
  const WorldModel b = GenerateWorld(5, Params(15, 0.1), starts);
  ASSERT_EQ(a.cylinders.size(), b.cylinders.size());
  for (size_t i = 0; i < a.cylinders.size(); ++i) {
    EXPECT_EQ(a.cylinders[i].cx, b.cylinders[i].cx);
    EXPECT_EQ(a.cylinders[i].cy, b.cylinders[i].cy);
  }
  EXPECT_TRUE(a.truth == b.truth);
  const WorldModel c = GenerateWorld(6, Params(15, 0.1), starts);
  EXPECT_NE(a.cylinders[0].cx, c.cylinders[0].cx);
}

TEST(GenerateWorld, StartsStayClearAndCylindersInside) {
  const auto starts = StartPositions(4, 0.3);
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    const WorldModel w = GenerateWorld(seed, Params(15, 0.1), starts);
    for (const Cylinder &c : w.cylinders) {
      EXPECT_GE(c.cx - c.radius, 0.0);
      EXPECT_LE(c.cx + c.radius, 15.0);
      EXPECT_GE(c.cy - c.radius, 0.0);
      EXPECT_LE(c.cy + c.radius, 15.0);
      for (const Vec3 &s : starts) {
        EXPECT_GE(std::hypot(c.cx - s.x(), c.cy - s.y()), 1.0 + c.radius - 1e-9);
      }
    }
  }
}

TEST(StartPositions, ThreeMetersApart) {
  const auto s = StartPositions(3, 0.3);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_NEAR(s[1].x() - s[0].x(), 3.0, 1e-12);
  EXPECT_NEAR(s[2].x() - s[1].x(), 3.0, 1e-12);
  EXPECT_EQ(s[0].y(), s[2].y());
}

TEST(Rasterize, OccupiedIffInsideFootprintAndBelowTop) {
  const std::vector<Cylinder> cyl = {{2.0, 2.0, 0.35, 1.5}, {4.1, 1.0, 0.5, 3.0}};
  const VoxelGrid g = RasterizeCylinders(Vec3(6, 6, 3), cyl, 0.3);
  EXPECT_EQ(g.dims(), Index3(20, 20, 10));
  for (int64_t i = 0; i < g.size(); ++i) {
    const Vec3 p = g.Center(i);
    bool inside = false;
    for (const Cylinder &c : cyl) {
      inside |= std::hypot(p.x() - c.cx, p.y() - c.cy) <= c.radius &&
                p.z() <= c.height;
    }
    EXPECT_EQ(g.Get(i), inside ? VoxelState::kOccupied : VoxelState::kFree);
  }
}

WorldModel OneCylinder() {
  WorldModel w;
  w.bounds = Vec3(9, 9, 3);
  w.cylinders = {{4.65, 4.65, 0.35, 3.0}};
  w.truth = RasterizeCylinders(w.bounds, w.cylinders, 0.3);
  return w;
}

TEST(SenseLidar, EmptyWorldGivesOnlyMaxRange) {
  WorldModel w;
  w.bounds = Vec3(6, 6, 3);
  w.truth = RasterizeCylinders(w.bounds, {}, 0.3);
  const PointCloud c = SenseLidar(w, Vec3(1.65, 1.65, 1.65), {}, 10.0, 0.3);
  EXPECT_TRUE(c.points.empty());
  EXPECT_FALSE(c.max_range_points.empty());
}

TEST(SenseLidar, CylinderOccludesWhatIsBehind) {
  const WorldModel w = OneCylinder();
  const Vec3 sensor(1.65, 4.65, 1.65);
  const PointCloud c = SenseLidar(w, sensor, {}, 10.0, 0.3);
  ASSERT_FALSE(c.points.empty());
  for (const Vec3 &p : c.points) {
    EXPECT_EQ(w.truth.Get(w.truth.PointToIndex(p)), VoxelState::kOccupied);
    EXPECT_LT(p.x(), 4.65);
  }
  // nothing straight behind the cylinder is seen
  const Vec3 behind(7.35, 4.65, 1.65);
  for (const Vec3 &p : c.max_range_points) {
    EXPECT_GT((p - behind).norm(), 0.2);
  }
}

TEST(SenseLidar, OtherAgentsShowUpAndAreRemoved) {
  WorldModel w;
  w.bounds = Vec3(9, 9, 3);
  w.truth = RasterizeCylinders(w.bounds, {}, 0.3);
  const Vec3 sensor(2.55, 4.65, 1.65), other(4.55, 4.65, 1.65);
  const PointCloud c = SenseLidar(w, sensor, {other}, 10.0, 0.3);
  int body = 0;
  for (const Vec3 &p : c.points) body += (p - other).norm() < 0.31;
  EXPECT_GT(body, 0);
  VoxelGrid local = VoxelGrid::FromWorldOrigin(Vec3::Zero(), Index3(30, 30, 10), 0.3);
  IntegrateScan(local, c, {other}, 0.6);
  EXPECT_EQ(local.Count(VoxelState::kOccupied), 0);
}

TEST(WorldFile, RoundTrip) {
  const std::vector<Cylinder> cyl = {{1.25, 2.5, 0.35, 3.0}, {0.1, 0.2, 0.3, 0.4}};
  const std::string path =
      (std::filesystem::temp_directory_path() / "explore_world.txt").string();
  SaveWorldFile(cyl, path);
  const auto back = LoadWorldFile(path);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].cx, 0.1);
  EXPECT_EQ(back[0].height, 3.0);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace explore
