#include "core/corridor.hpp"

#include <algorithm>
#include <cstdio>

#include "core/distance_field.hpp"
#include "core/qp_solver.hpp"

namespace explore {

Polyhedron BoxToPolyhedron(const VoxelGrid &grid, const VoxelBox &box,
                           double shrink) {
  const double vs = grid.voxel_size();
  const Vec3 lo = (grid.origin_index() + box.lo).cast<double>() * vs;
  const Vec3 hi =
      (grid.origin_index() + box.hi + Index3::Ones()).cast<double>() * vs;
  Polyhedron poly;
  for (int axis = 0; axis < 3; ++axis) {
    Halfspace up, down;
    up.normal = Vec3::Unit(axis);
    up.offset = hi[axis] - shrink;
    down.normal = -Vec3::Unit(axis);
    down.offset = -(lo[axis] + shrink);
    poly.halfspaces.push_back(up);
    poly.halfspaces.push_back(down);
  }
  return poly;
}

bool BoxIsFree(const VoxelGrid &grid, const VoxelBox &box) {
  if (!grid.Contains(box.lo) || !grid.Contains(box.hi)) return false;
  for (int z = box.lo.z(); z <= box.hi.z(); ++z) {
    for (int y = box.lo.y(); y <= box.hi.y(); ++y) {
      for (int x = box.lo.x(); x <= box.hi.x(); ++x) {
        if (grid.Get(Index3(x, y, z)) != VoxelState::kFree) return false;
      }
    }
  }
  return true;
}

VoxelBox GrowBox(const VoxelGrid &grid, VoxelBox box) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (int face = 0; face < 6; ++face) {
      const int axis = face / 2;
      const bool positive = face % 2 == 0;
      VoxelBox layer = box;
      if (positive) {
        layer.lo[axis] = layer.hi[axis] = box.hi[axis] + 1;
      } else {
        layer.lo[axis] = layer.hi[axis] = box.lo[axis] - 1;
      }
      if (!BoxIsFree(grid, layer)) continue;
      if (positive) {
        box.hi[axis] += 1;
      } else {
        box.lo[axis] -= 1;
      }
      changed = true;
    }
  }
  return box;
}

namespace {

VoxelBox Union(const VoxelBox &a, const VoxelBox &b) {
  return {a.lo.cwiseMin(b.lo), a.hi.cwiseMax(b.hi)};
}

VoxelBox Block(const Index3 &c, int r) {
  return {c - Index3::Constant(r), c + Index3::Constant(r)};
}

// first candidate box that is entirely free, or the single voxel fallback
VoxelBox FirstFree(const VoxelGrid &grid,
                   const std::vector<VoxelBox> &candidates,
                   const Index3 &fallback) {
  for (const VoxelBox &b : candidates) {
    if (BoxIsFree(grid, b)) return b;
  }
  return {fallback, fallback};
}

// end of the run of consecutive waypoints, starting at `from`, inside poly
size_t LastInside(const GridPath &path, size_t from, const Polyhedron &poly) {
  size_t last = from;
  for (size_t i = from; i < path.waypoints.size(); ++i) {
    if (!poly.Contains(path.waypoints[i], 1e-9)) break;
    last = i;
  }
  return last;
}

}  // namespace

std::vector<Polyhedron> BuildCorridor(const VoxelGrid &grid,
                                      const GridPath &path, int p_hor,
                                      double d_rad, const Vec3 *anchor) {
  if (path.voxels.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty path");
  }
  const Index3 &first = path.voxels.front();
  if (!grid.Contains(first) || grid.Get(first) != VoxelState::kFree) {
    throw Error(ErrorCode::kInvalidArgument, "first path voxel is not free");
  }
  const int r = std::max(1, InflationVoxels(d_rad, grid.voxel_size()));
  const size_t last = path.voxels.size() - 1;

  std::vector<Polyhedron> out;
  std::vector<VoxelBox> seeds;
  const VoxelBox first_block = Block(first, r);
  if (anchor != nullptr) {
    const VoxelBox around{grid.PointToIndex(*anchor - Vec3::Constant(d_rad)),
                          grid.PointToIndex(*anchor + Vec3::Constant(d_rad))};
    seeds.push_back(Union(around, first_block));
    seeds.push_back(first_block);
    seeds.push_back(around);
  } else {
    seeds.push_back(first_block);
  }
  if (last > 0) {
    seeds.push_back(Union({first, first}, {path.voxels[1], path.voxels[1]}));
  }
  VoxelBox box = GrowBox(grid, FirstFree(grid, seeds, first));
  Polyhedron poly = BoxToPolyhedron(grid, box, d_rad);
  out.push_back(poly);
  size_t reached = LastInside(path, 0, poly);

  while (static_cast<int>(out.size()) < p_hor && reached < last) {
    const Index3 &a = path.voxels[reached];
    const Index3 &b = path.voxels[reached + 1];
    seeds = {Union(Block(a, r), Block(b, r)), Block(a, r),
             Union({a, a}, {b, b})};
    box = GrowBox(grid, FirstFree(grid, seeds, b));
    poly = BoxToPolyhedron(grid, box, d_rad);
    size_t next = LastInside(path, reached, poly);
    if (next <= reached) {
      // no overlap that makes progress: restart from the next waypoint
      seeds = {Block(b, r)};
      box = GrowBox(grid, FirstFree(grid, seeds, b));
      poly = BoxToPolyhedron(grid, box, d_rad);
      next = std::max(reached + 1, LastInside(path, reached + 1, poly));
    }
    out.push_back(poly);
    reached = next;
  }
  return out;
}

Halfspace SeparatingHyperplane(const Vec3 &p_self, const Vec3 &p_other,
                               double d_rad) {
  const Vec3 diff = p_other - p_self;
  const double dist = diff.norm();
  if (dist < 1e-12) {
    throw Error(ErrorCode::kDegenerateGeometry, "coincident agent positions");
  }
  Halfspace h;
  h.normal = diff / dist;
  h.offset = h.normal.dot(0.5 * (p_self + p_other)) - d_rad;
  return h;
}

Polyhedron TimeAwareCorridor::At(int k, int p) const {
  Polyhedron poly = base[p];
  poly.halfspaces.insert(poly.halfspaces.end(), extra[k].begin(),
                         extra[k].end());
  return poly;
}

TimeAwareCorridor AssembleTimeAware(
    const std::vector<Polyhedron> &base, const std::vector<Vec3> &own_pred,
    const std::vector<NeighborPrediction> &others, double cutoff) {
  TimeAwareCorridor tac;
  tac.base = base;
  const int steps = static_cast<int>(own_pred.size()) - 1;
  tac.extra.assign(std::max(steps, 0), {});
  tac.infeasible.assign(std::max(steps, 0), false);

  for (const NeighborPrediction &other : others) {
    if (other.positions.empty()) continue;
    if ((other.positions.front() - own_pred.front()).norm() > cutoff) continue;
    const int last = static_cast<int>(other.positions.size()) - 1;
    std::optional<Halfspace> previous;
    for (int k = 0; k < steps; ++k) {
      const Vec3 &self = own_pred[k + 1];
      const Vec3 &them = other.positions[std::min(k + 1, last)];
      if ((them - self).norm() < 1e-9) {
        // coincident predictions: keep the last well-defined plane
        if (previous) {
          tac.extra[k].push_back(*previous);
        } else {
          Halfspace h;
          h.normal = Vec3::UnitX();
          h.offset = h.normal.dot(self) - other.d_rad;
          tac.extra[k].push_back(h);
        }
        continue;
      }
      previous = SeparatingHyperplane(self, them, other.d_rad);
      tac.extra[k].push_back(*previous);
    }
  }

  for (int k = 0; k < steps; ++k) {
    bool any = false;
    for (size_t p = 0; p < base.size() && !any; ++p) {
      any = !IsEmpty(tac.At(k, static_cast<int>(p)).halfspaces);
    }
    tac.infeasible[k] = !any;
  }
  return tac;
}

bool IsEmpty(const std::vector<Halfspace> &halfspaces) {
  QpProblem qp;
  qp.H = Eigen::MatrixXd::Identity(3, 3);
  qp.g = Eigen::VectorXd::Zero(3);
  qp.Aeq.resize(0, 3);
  qp.beq.resize(0);
  const int m = static_cast<int>(halfspaces.size());
  qp.Ain.resize(m, 3);
  qp.bin.resize(m);
  for (int i = 0; i < m; ++i) {
    qp.Ain.row(i) = halfspaces[i].normal.transpose();
    qp.bin(i) = halfspaces[i].offset;
  }
  return SolveQp(qp).status != QpStatus::kOptimal;
}

std::string FormatCorridorDump(const TimeAwareCorridor &tac) {
  std::string out;
  char line[160];
  for (int k = 0; k < tac.steps(); ++k) {
    for (size_t p = 0; p < tac.base.size(); ++p) {
      std::snprintf(line, sizeof(line), "poly %d %zu\n", k, p);
      out += line;
      for (const Halfspace &h : tac.At(k, static_cast<int>(p)).halfspaces) {
        std::snprintf(line, sizeof(line), "h %.9f %.9f %.9f %.9f\n",
                      h.normal.x(), h.normal.y(), h.normal.z(), h.offset);
        out += line;
      }
    }
  }
  return out;
}

}  // namespace explore
