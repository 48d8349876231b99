#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/voxel_grid.hpp"

namespace explore {

struct Cluster {
  std::vector<int64_t> members;  // linear indices, ascending
  Vec3 centroid = Vec3::Zero();  // world position
  int64_t potential_goal = -1;
  // exact centroid bookkeeping in voxel units: centroid = sum / count
  Eigen::Matrix<int64_t, 3, 1> index_sum = Eigen::Matrix<int64_t, 3, 1>::Zero();
};

struct GoalAssignment {
  std::vector<std::optional<Vec3>> goals;          // per agent
  std::vector<std::optional<size_t>> goal_index;   // index into the goal list
  uint64_t round_id = 0;
};

// free voxels with at least one unknown voxel among their in-grid
// 26-neighbors; returned as ascending linear indices
std::vector<int64_t> FindBorderVoxels(const VoxelGrid &grid);

// 26-connected components of the border set. Clusters come out ordered by
// their smallest member; centroid and potential goal are filled in.
std::vector<Cluster> ClusterBorders(const VoxelGrid &grid,
                                    const std::vector<int64_t> &borders);

// member whose center is closest to the centroid; ties go to the smallest
// linear index. Distances are compared exactly in integer voxel units.
int64_t SelectPotentialGoal(const VoxelGrid &grid, const Cluster &cluster);

// greedy assignment in agent-id order; each agent takes the closest goal
// still available (ties: smallest goal index)
GoalAssignment AssignGoals(const std::vector<Vec3> &agents,
                           const std::vector<Vec3> &potential_goals,
                           uint64_t round_id = 0);

// true iff no unknown voxel has a reachable free 26-neighbor. `reachable` is
// indexed like the grid.
bool ExplorationComplete(const VoxelGrid &grid,
                         const std::vector<uint8_t> &reachable);

// number of unknown voxels with at least one reachable 26-neighbor
int64_t CountReachableUnknown(const VoxelGrid &grid,
                              const std::vector<uint8_t> &reachable);

// one line per cluster: "<member_count> <cx> <cy> <cz> <gx> <gy> <gz>"
// where g is the world center of the potential goal voxel
std::string FormatClusterDump(const VoxelGrid &grid,
                              const std::vector<Cluster> &clusters);

}  // namespace explore
