#pragma once

#include <string>
#include <vector>

#include "core/path_search.hpp"
#include "core/voxel_grid.hpp"

namespace explore {

// normal . p <= offset
struct Halfspace {
  Vec3 normal = Vec3::UnitX();
  double offset = 0.0;

  double Violation(const Vec3 &p) const { return normal.dot(p) - offset; }
};

struct Polyhedron {
  std::vector<Halfspace> halfspaces;

  bool Contains(const Vec3 &p, double tol = 0.0) const {
    for (const Halfspace &h : halfspaces) {
      if (h.Violation(p) > tol) return false;
    }
    return true;
  }
};

// inclusive voxel index range of a cuboid
struct VoxelBox {
  Index3 lo = Index3::Zero();
  Index3 hi = Index3::Zero();
};

// the 6 halfspaces of the metric box covered by `box`, each moved inward
// by `shrink`
Polyhedron BoxToPolyhedron(const VoxelGrid &grid, const VoxelBox &box,
                           double shrink);

// true when every voxel of the box is in the grid and free
bool BoxIsFree(const VoxelGrid &grid, const VoxelBox &box);

// greedy growth: faces are tried in the order +x, -x, +y, -y, +z, -z and
// pushed out one layer at a time while the new layer is free
VoxelBox GrowBox(const VoxelGrid &grid, VoxelBox box);

// Overlapping cuboids along the path, at most `p_hor` of them. When `anchor`
// is given (the agent position), the first seed also covers the voxels
// touched by the cube of half-size d_rad around it, so the first polyhedron
// contains the agent. Throws kInvalidArgument when the first path voxel is
// not free.
std::vector<Polyhedron> BuildCorridor(const VoxelGrid &grid,
                                      const GridPath &path, int p_hor,
                                      double d_rad,
                                      const Vec3 *anchor = nullptr);

// Halfspace that keeps p_self at least d_rad on its side of the bisector
// plane. Throws kDegenerateGeometry for coincident points.
Halfspace SeparatingHyperplane(const Vec3 &p_self, const Vec3 &p_other,
                               double d_rad);

// Prediction of another agent as seen by the planner: positions sampled on
// the previous plan's time grid and the clearance to use against it.
struct NeighborPrediction {
  std::vector<Vec3> positions;  // N+1 points
  double d_rad = 0.0;
};

struct TimeAwareCorridor {
  std::vector<Polyhedron> base;
  // extra[k]: hyperplanes that constrain points k and k+1 of the new plan
  std::vector<std::vector<Halfspace>> extra;
  // per step: true when no base polyhedron survives the added hyperplanes
  std::vector<bool> infeasible;

  int steps() const { return static_cast<int>(extra.size()); }
  Polyhedron At(int k, int p) const;
};

// Builds the per-step corridors from the previous predictions: own_pred and
// every neighbor's positions are points 0..N of the previous plan's time
// grid (point i at t_prev + i*h). The new plan starts one period later, so
// its step k (points k and k+1) gets the hyperplane of the pair at previous
// point k+1; past the horizon the last point is reused. Neighbors whose
// first position is farther than `cutoff` are skipped.
TimeAwareCorridor AssembleTimeAware(const std::vector<Polyhedron> &base,
                                    const std::vector<Vec3> &own_pred,
                                    const std::vector<NeighborPrediction> &others,
                                    double cutoff);

// exact emptiness of the intersection of halfspaces (solved as a QP)
bool IsEmpty(const std::vector<Halfspace> &halfspaces);

// "h <nx> <ny> <nz> <offset>" per halfspace, "poly <k> <p>" headers
std::string FormatCorridorDump(const TimeAwareCorridor &tac);

}  // namespace explore
