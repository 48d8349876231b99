#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/mapping.hpp"
#include "core/voxel_grid.hpp"

namespace explore {

struct Cylinder {
  double cx = 0.0;
  double cy = 0.0;
  double radius = 0.0;
  double height = 0.0;
};

struct WorldParams {
  Vec3 size = Vec3(15.0, 15.0, 3.0);
  double density = 0.1;  // cylinders per square meter
  double radius = 0.35;
  double height = 3.0;
  double start_clearance = 1.0;
  double voxel_size = 0.3;
};

struct WorldModel {
  Vec3 bounds = Vec3::Zero();
  std::vector<Cylinder> cylinders;
  VoxelGrid truth;  // covers [0, bounds], every voxel free or occupied
};

// agent i starts at the center of voxel (5 + 10 i, 5, 5) for 0.3 m voxels,
// i.e. 3 m apart along x
std::vector<Vec3> StartPositions(int agents, double voxel_size);

// round(density * x * y) cylinders with uniformly drawn centers (kept inside
// the bounds), rejecting any that would enter the clearance disk of a start
WorldModel GenerateWorld(uint64_t seed, const WorldParams &params,
                         const std::vector<Vec3> &starts);

// occupied iff the voxel center is inside a cylinder's footprint and below
// its top
VoxelGrid RasterizeCylinders(const Vec3 &bounds,
                             const std::vector<Cylinder> &cylinders,
                             double voxel_size);

// Visibility scan against the truth grid. Every truth voxel center within
// range is the target of one ray; the first occupied voxel on the way gives a
// hit point just inside its entry face, otherwise the target itself is a
// max-range return. Bodies of the other agents (spheres of radius `body`)
// add surface points; agents never occlude rays.
PointCloud SenseLidar(const WorldModel &world, const Vec3 &sensor,
                      const std::vector<Vec3> &other_agents, double range,
                      double body);

// text world file: one "cx cy radius height" line per cylinder
void SaveWorldFile(const std::vector<Cylinder> &cylinders,
                   const std::string &path);
std::vector<Cylinder> LoadWorldFile(const std::string &path);

}  // namespace explore
