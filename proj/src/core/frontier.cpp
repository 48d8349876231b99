#include "core/frontier.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

namespace explore {

std::vector<int64_t> FindBorderVoxels(const VoxelGrid &grid) {
  std::vector<int64_t> out;
  const Index3 &d = grid.dims();
  const auto &offsets = NeighborOffsets26();
  for (int z = 0; z < d.z(); ++z) {
    for (int y = 0; y < d.y(); ++y) {
      for (int x = 0; x < d.x(); ++x) {
        const Index3 idx(x, y, z);
        if (grid.Get(idx) != VoxelState::kFree) continue;
        for (const Index3 &o : offsets) {
          const Index3 n = idx + o;
          if (grid.Contains(n) && grid.Get(n) == VoxelState::kUnknown) {
            out.push_back(grid.Linear(idx));
            break;
          }
        }
      }
    }
  }
  return out;
}

std::vector<Cluster> ClusterBorders(const VoxelGrid &grid,
                                    const std::vector<int64_t> &borders) {
  // 0 = not a border voxel, 1 = unvisited border, 2 = visited
  std::vector<uint8_t> tag(grid.size(), 0);
  for (int64_t b : borders) tag[b] = 1;

  std::vector<int64_t> sorted = borders;
  std::sort(sorted.begin(), sorted.end());

  std::vector<Cluster> clusters;
  std::vector<int64_t> stack;
  for (int64_t seed : sorted) {
    if (tag[seed] != 1) continue;
    Cluster c;
    tag[seed] = 2;
    stack.push_back(seed);
    while (!stack.empty()) {
      const int64_t cur = stack.back();
      stack.pop_back();
      c.members.push_back(cur);
      const Index3 ci = grid.Unlinear(cur);
      for (const Index3 &o : NeighborOffsets26()) {
        const Index3 n = ci + o;
        if (!grid.Contains(n)) continue;
        const int64_t nl = grid.Linear(n);
        if (tag[nl] == 1) {
          tag[nl] = 2;
          stack.push_back(nl);
        }
      }
    }
    std::sort(c.members.begin(), c.members.end());
    for (int64_t m : c.members) {
      c.index_sum += grid.Unlinear(m).cast<int64_t>();
    }
    const double count = static_cast<double>(c.members.size());
    const Vec3 mean_index = c.index_sum.cast<double>() / count;
    c.centroid = (grid.origin_index().cast<double>() + mean_index +
                  Vec3::Constant(0.5)) *
                 grid.voxel_size();
    c.potential_goal = SelectPotentialGoal(grid, c);
    clusters.push_back(std::move(c));
  }
  return clusters;
}

int64_t SelectPotentialGoal(const VoxelGrid &grid, const Cluster &cluster) {
  if (cluster.members.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty cluster");
  }
  // |count * idx - sum|^2 is count^2 times the squared distance to the mean
  Eigen::Matrix<int64_t, 3, 1> sum = Eigen::Matrix<int64_t, 3, 1>::Zero();
  for (int64_t m : cluster.members) sum += grid.Unlinear(m).cast<int64_t>();
  const int64_t count = static_cast<int64_t>(cluster.members.size());

  int64_t best = -1;
  int64_t best_d2 = std::numeric_limits<int64_t>::max();
  for (int64_t m : cluster.members) {
    const Eigen::Matrix<int64_t, 3, 1> diff =
        grid.Unlinear(m).cast<int64_t>() * count - sum;
    const int64_t d2 = diff.squaredNorm();
    if (d2 < best_d2 || (d2 == best_d2 && m < best)) {
      best_d2 = d2;
      best = m;
    }
  }
  return best;
}

GoalAssignment AssignGoals(const std::vector<Vec3> &agents,
                           const std::vector<Vec3> &potential_goals,
                           uint64_t round_id) {
  GoalAssignment out;
  out.round_id = round_id;
  out.goals.resize(agents.size());
  out.goal_index.resize(agents.size());
  std::vector<bool> taken(potential_goals.size(), false);
  size_t remaining = potential_goals.size();
  for (size_t a = 0; a < agents.size() && remaining > 0; ++a) {
    size_t best = potential_goals.size();
    double best_d2 = std::numeric_limits<double>::infinity();
    for (size_t g = 0; g < potential_goals.size(); ++g) {
      if (taken[g]) continue;
      const double d2 = (potential_goals[g] - agents[a]).squaredNorm();
      if (d2 < best_d2) {
        best_d2 = d2;
        best = g;
      }
    }
    taken[best] = true;
    --remaining;
    out.goals[a] = potential_goals[best];
    out.goal_index[a] = best;
  }
  return out;
}

int64_t CountReachableUnknown(const VoxelGrid &grid,
                              const std::vector<uint8_t> &reachable) {
  int64_t count = 0;
  const Index3 &d = grid.dims();
  for (int z = 0; z < d.z(); ++z) {
    for (int y = 0; y < d.y(); ++y) {
      for (int x = 0; x < d.x(); ++x) {
        const Index3 idx(x, y, z);
        if (grid.Get(idx) != VoxelState::kUnknown) continue;
        for (const Index3 &o : NeighborOffsets26()) {
          const Index3 n = idx + o;
          if (grid.Contains(n) && reachable[grid.Linear(n)] &&
              grid.Get(n) == VoxelState::kFree) {
            ++count;
            break;
          }
        }
      }
    }
  }
  return count;
}

bool ExplorationComplete(const VoxelGrid &grid,
                         const std::vector<uint8_t> &reachable) {
  if (grid.Count(VoxelState::kUnknown) == 0) return true;
  return CountReachableUnknown(grid, reachable) == 0;
}

std::string FormatClusterDump(const VoxelGrid &grid,
                              const std::vector<Cluster> &clusters) {
  std::string out;
  char line[256];
  for (const Cluster &c : clusters) {
    const Vec3 g = grid.Center(c.potential_goal);
    std::snprintf(line, sizeof(line), "%zu %.6f %.6f %.6f %.6f %.6f %.6f\n",
                  c.members.size(), c.centroid.x(), c.centroid.y(),
                  c.centroid.z(), g.x(), g.y(), g.z());
    out += line;
  }
  return out;
}

}  // namespace explore
