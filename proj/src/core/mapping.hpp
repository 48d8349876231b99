#pragma once

#include <vector>

#include "core/voxel_grid.hpp"

namespace explore {

// One lidar sweep. `points` are surface returns; `max_range_points` are the
// endpoints of rays that saw nothing (they only carve free space).
struct PointCloud {
  Vec3 sensor_origin = Vec3::Zero();
  std::vector<Vec3> points;
  std::vector<Vec3> max_range_points;
};

// Ray-casts the cloud into `grid`. Points within `removal_radius` of any
// other agent center are dropped first. Within one call occupied wins over
// free. Throws kPositioning if the sensor is outside the grid.
void IntegrateScan(VoxelGrid &grid, const PointCloud &cloud,
                   const std::vector<Vec3> &other_agent_centers,
                   double removal_radius);

// Slides the grid so that `agent_position` falls in the center voxel
// (index (dims-1)/2 per axis). Overlapping voxels keep their state.
VoxelGrid Recenter(const VoxelGrid &grid, const Vec3 &agent_position);

// Copies known local voxels into the global grid. With `static_env`, global
// voxels that are already occupied are never overwritten.
void MergeLocalIntoGlobal(VoxelGrid &global, const VoxelGrid &local,
                          bool static_env);

}  // namespace explore
