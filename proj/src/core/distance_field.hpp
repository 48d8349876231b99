#pragma once

#include <vector>

#include "core/voxel_grid.hpp"

namespace explore {

// Exact Euclidean distance (m) from each voxel center to the nearest
// occupied-or-unknown voxel center of the same grid. Infinity when the grid
// has no such voxel.
struct DistanceField {
  Index3 dims = Index3::Zero();
  std::vector<double> distance;

  double At(int64_t lin) const { return distance[lin]; }
};

// separable squared-distance transform (lower envelope of parabolas per
// axis, one pass for x, y, z)
DistanceField ComputeDistanceField(const VoxelGrid &grid);

// number of voxel layers to block around non-free voxels so that a sphere of
// radius `radius` centered in a traversable voxel never touches one
int InflationVoxels(double radius, double voxel_size);

// 1 for free voxels with no non-free voxel (out-of-grid counts as non-free)
// within Chebyshev distance `inflation` voxels
std::vector<uint8_t> ComputeTraversable(const VoxelGrid &grid, int inflation);

// box dilation of a mask by `radius` voxels (out-of-grid ignored)
std::vector<uint8_t> DilateMask(const Index3 &dims,
                                const std::vector<uint8_t> &mask, int radius);

}  // namespace explore
