#pragma once

#include <optional>
#include <vector>

#include "core/distance_field.hpp"
#include "core/voxel_grid.hpp"

namespace explore {

// Step counts of a 26-connected path by step class (face, edge, corner).
// Keeping lengths as integer counts makes equal-length comparisons exact.
struct StepCounts {
  int straight = 0;
  int planar = 0;
  int diagonal = 0;

  double Length(double voxel_size) const {
    return voxel_size * (straight + planar * std::sqrt(2.0) +
                         diagonal * std::sqrt(3.0));
  }
  bool operator==(const StepCounts &) const = default;
};

struct GridPath {
  std::vector<Index3> voxels;    // local grid indices
  std::vector<Vec3> waypoints;   // world voxel centers
  StepCounts steps;
  double length = 0.0;
};

// octile-style lower bound on the 26-connected distance between two voxels
double OctileDistance(const Index3 &a, const Index3 &b, double voxel_size);

// Jump point search over `traversable` (26-connected, Euclidean step costs).
// Throws kInvalidArgument when the start is not traversable; returns
// nullopt when the goal cannot be reached.
std::optional<GridPath> JpsSearch(const VoxelGrid &grid,
                                  const std::vector<uint8_t> &traversable,
                                  const Index3 &start, const Index3 &goal);

// same search with free voxels as the traversable set
std::optional<GridPath> JpsSearch(const VoxelGrid &grid, const Index3 &start,
                                  const Index3 &goal);

// sum over steps of step_length + weight * max(0, push_dist - field(next))
double PenalizedCost(const VoxelGrid &grid, const DistanceField &field,
                     const std::vector<Index3> &voxels, double push_dist,
                     double weight);

// Distance-map refinement: A* with the clearance penalty between the end
// points of `jps_path`. A path that already pays no penalty is returned as is.
GridPath DmpPush(const VoxelGrid &grid, const std::vector<uint8_t> &traversable,
                 const DistanceField &field, const GridPath &jps_path,
                 double push_dist, double weight);

// Flood fill from the seeds over the traversable set (free voxels inflated by
// `inflation` layers, 26-connected). A seed that is not traversable is moved
// to the nearest traversable voxel within 2 voxels, or dropped. The result
// marks free voxels within `inflation` voxels of the flooded region.
std::vector<uint8_t> ReachableSet(const VoxelGrid &grid,
                                  const std::vector<Index3> &seeds,
                                  int inflation);

// nearest voxel (Euclidean, ties by smallest linear index) with mask set,
// searching a cube of the given radius around `idx`
std::optional<Index3> NearestInMask(const VoxelGrid &grid,
                                    const std::vector<uint8_t> &mask,
                                    const Index3 &idx, int radius);

// Goal voxel inside the local grid. Goals outside are replaced by the point
// where the agent->goal segment leaves the grid, pulled one voxel inward and
// snapped to the nearest voxel of `mask` (free voxels when mask is null)
// within 5 voxels.
std::optional<Index3> IntermediateGoal(const VoxelGrid &grid,
                                       const Vec3 &agent_position,
                                       const Vec3 &global_goal,
                                       const std::vector<uint8_t> *mask =
                                           nullptr);

// builds a GridPath (waypoints, counts, length) from 26-adjacent voxels
GridPath MakeGridPath(const VoxelGrid &grid, std::vector<Index3> voxels);

}  // namespace explore
