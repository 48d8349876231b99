#include "core/mapping.hpp"

#include <cmath>

namespace explore {

namespace {

enum Mark : uint8_t { kNone = 0, kMarkFree = 1, kMarkOccupied = 2 };

bool NearAnyAgent(const Vec3 &p, const std::vector<Vec3> &centers,
                  double radius) {
  const double r2 = radius * radius;
  for (const Vec3 &c : centers) {
    if ((p - c).squaredNorm() <= r2) return true;
  }
  return false;
}

}  // namespace

void IntegrateScan(VoxelGrid &grid, const PointCloud &cloud,
                   const std::vector<Vec3> &other_agent_centers,
                   double removal_radius) {
  if (!grid.ContainsPoint(cloud.sensor_origin)) {
    throw Error(ErrorCode::kPositioning, "sensor origin outside the grid");
  }
  std::vector<uint8_t> marks(grid.size(), kNone);
  const double vs = grid.voxel_size();

  auto cast = [&](const Vec3 &end, bool hit) {
    const Index3 end_world = WorldVoxelIndex(end, vs);
    TraverseSegment(cloud.sensor_origin, end, vs, [&](const Index3 &w) {
      const Index3 idx = w - grid.origin_index();
      // the grid is convex and the ray starts inside, so leaving ends it
      if (!grid.Contains(idx)) return false;
      uint8_t &m = marks[grid.Linear(idx)];
      if (hit && w == end_world) {
        m = kMarkOccupied;
      } else if (m == kNone) {
        m = kMarkFree;
      }
      return true;
    });
  };

  for (const Vec3 &p : cloud.points) {
    if (NearAnyAgent(p, other_agent_centers, removal_radius)) continue;
    cast(p, true);
  }
  for (const Vec3 &p : cloud.max_range_points) {
    if (NearAnyAgent(p, other_agent_centers, removal_radius)) continue;
    cast(p, false);
  }

  auto states = grid.mutable_states();
  for (size_t i = 0; i < marks.size(); ++i) {
    if (marks[i] == kMarkOccupied) {
      states[i] = VoxelState::kOccupied;
    } else if (marks[i] == kMarkFree) {
      states[i] = VoxelState::kFree;
    }
  }
}

VoxelGrid Recenter(const VoxelGrid &grid, const Vec3 &agent_position) {
  const Index3 center = (grid.dims() - Index3::Ones()) / 2;
  const Index3 agent_world = WorldVoxelIndex(agent_position, grid.voxel_size());
  const Index3 new_origin = agent_world - center;
  if (new_origin == grid.origin_index()) return grid;

  VoxelGrid out(new_origin, grid.dims(), grid.voxel_size());
  const Index3 shift = new_origin - grid.origin_index();
  const Index3 &d = grid.dims();
  for (int z = 0; z < d.z(); ++z) {
    for (int y = 0; y < d.y(); ++y) {
      for (int x = 0; x < d.x(); ++x) {
        const Index3 src = Index3(x, y, z) + shift;
        if (grid.Contains(src)) out.Set(Index3(x, y, z), grid.Get(src));
      }
    }
  }
  return out;
}

void MergeLocalIntoGlobal(VoxelGrid &global, const VoxelGrid &local,
                          bool static_env) {
  if (std::abs(global.voxel_size() - local.voxel_size()) > 1e-12) {
    throw Error(ErrorCode::kAlignment, "voxel sizes differ");
  }
  const Index3 shift = local.origin_index() - global.origin_index();
  const Index3 &d = local.dims();
  for (int z = 0; z < d.z(); ++z) {
    for (int y = 0; y < d.y(); ++y) {
      for (int x = 0; x < d.x(); ++x) {
        const VoxelState s = local.Get(Index3(x, y, z));
        if (s == VoxelState::kUnknown) continue;
        const Index3 g = Index3(x, y, z) + shift;
        if (!global.Contains(g)) continue;
        if (static_env && global.Get(g) == VoxelState::kOccupied) continue;
        global.Set(g, s);
      }
    }
  }
}

}  // namespace explore
