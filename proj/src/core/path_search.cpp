#include "core/path_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace explore {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrt3 = 1.7320508075688772;

int StepClass(const Index3 &d) {
  return std::abs(d.x()) + std::abs(d.y()) + std::abs(d.z());
}

void AddSteps(StepCounts &c, int step_class, int n) {
  if (step_class == 1) c.straight += n;
  if (step_class == 2) c.planar += n;
  if (step_class == 3) c.diagonal += n;
}

struct OpenEntry {
  double f;
  double g;
  int64_t lin;
  // min-heap on f, then larger g (deeper first), then smaller index
  bool operator>(const OpenEntry &o) const {
    if (f != o.f) return f > o.f;
    if (g != o.g) return g < o.g;
    return lin > o.lin;
  }
};

using OpenList =
    std::priority_queue<OpenEntry, std::vector<OpenEntry>, std::greater<>>;

class Jps {
 public:
  Jps(const VoxelGrid &grid, const std::vector<uint8_t> &traversable,
      const Index3 &goal)
      : grid_(grid), mask_(traversable), goal_(goal) {
    // cache which traversable voxels touch something blocked
    const int64_t n = grid.size();
    near_blocked_.assign(n, 0);
    for (int64_t i = 0; i < n; ++i) {
      if (!mask_[i]) continue;
      const Index3 idx = grid.Unlinear(i);
      for (const Index3 &o : NeighborOffsets26()) {
        if (!Open(idx + o)) {
          near_blocked_[i] = 1;
          break;
        }
      }
    }
  }

  bool Open(const Index3 &idx) const {
    return grid_.Contains(idx) && mask_[grid_.Linear(idx)];
  }

  // Walks from `from` along `d`; returns the first jump point or nothing.
  // `steps` receives the number of unit steps taken.
  std::optional<Index3> Jump(const Index3 &from, const Index3 &d,
                             int &steps) const {
    Index3 cur = from;
    steps = 0;
    const int cls = StepClass(d);
    while (true) {
      cur += d;
      if (!Open(cur)) return std::nullopt;
      ++steps;
      if (cur == goal_) return cur;
      if (near_blocked_[grid_.Linear(cur)]) return cur;
      if (cls >= 2) {
        for (const Index3 &sub : SubDirections(d)) {
          if (sub == d) continue;
          int s = 0;
          if (Jump(cur, sub, s)) return cur;
        }
      }
    }
  }

  // nonzero sub-directions of d (d itself included), tabulated per direction
  static const std::vector<Index3> &SubDirections(const Index3 &d) {
    static const std::array<std::vector<Index3>, 27> table = [] {
      std::array<std::vector<Index3>, 27> t;
      for (int z = -1; z <= 1; ++z) {
        for (int y = -1; y <= 1; ++y) {
          for (int x = -1; x <= 1; ++x) {
            auto &out = t[(x + 1) + 3 * (y + 1) + 9 * (z + 1)];
            for (int mz = 0; mz <= (z != 0); ++mz) {
              for (int my = 0; my <= (y != 0); ++my) {
                for (int mx = 0; mx <= (x != 0); ++mx) {
                  const Index3 s(mx * x, my * y, mz * z);
                  if (s != Index3::Zero()) out.push_back(s);
                }
              }
            }
          }
        }
      }
      return t;
    }();
    return table[(d.x() + 1) + 3 * (d.y() + 1) + 9 * (d.z() + 1)];
  }

  bool NearBlocked(int64_t lin) const { return near_blocked_[lin]; }

 private:
  const VoxelGrid &grid_;
  const std::vector<uint8_t> &mask_;
  Index3 goal_;
  std::vector<uint8_t> near_blocked_;
};

Index3 SignOf(const Index3 &v) {
  return Index3((v.x() > 0) - (v.x() < 0), (v.y() > 0) - (v.y() < 0),
                (v.z() > 0) - (v.z() < 0));
}

}  // namespace

double OctileDistance(const Index3 &a, const Index3 &b, double voxel_size) {
  std::array<int, 3> d = {std::abs(a.x() - b.x()), std::abs(a.y() - b.y()),
                          std::abs(a.z() - b.z())};
  std::sort(d.begin(), d.end());
  // d[0] corner steps, d[1]-d[0] edge steps, d[2]-d[1] face steps
  return voxel_size *
         (d[0] * kSqrt3 + (d[1] - d[0]) * kSqrt2 + (d[2] - d[1]));
}

GridPath MakeGridPath(const VoxelGrid &grid, std::vector<Index3> voxels) {
  GridPath path;
  path.voxels = std::move(voxels);
  path.waypoints.reserve(path.voxels.size());
  for (size_t i = 0; i < path.voxels.size(); ++i) {
    path.waypoints.push_back(grid.Center(path.voxels[i]));
    if (i > 0) {
      AddSteps(path.steps, StepClass(path.voxels[i] - path.voxels[i - 1]), 1);
    }
  }
  path.length = path.steps.Length(grid.voxel_size());
  return path;
}

std::optional<GridPath> JpsSearch(const VoxelGrid &grid,
                                  const std::vector<uint8_t> &traversable,
                                  const Index3 &start, const Index3 &goal) {
  if (!grid.Contains(start) || !traversable[grid.Linear(start)]) {
    throw Error(ErrorCode::kInvalidArgument, "start voxel is not traversable");
  }
  if (start == goal) return MakeGridPath(grid, {start});
  if (!grid.Contains(goal) || !traversable[grid.Linear(goal)]) {
    return std::nullopt;
  }

  const double vs = grid.voxel_size();
  const Jps jps(grid, traversable, goal);
  const int64_t n = grid.size();
  std::vector<double> g(n, std::numeric_limits<double>::infinity());
  std::vector<StepCounts> counts(n);
  std::vector<int64_t> parent(n, -1);
  std::vector<uint8_t> closed(n, 0);

  const int64_t s = grid.Linear(start);
  const int64_t t = grid.Linear(goal);
  g[s] = 0.0;
  OpenList open;
  open.push({OctileDistance(start, goal, vs), 0.0, s});

  bool found = false;
  while (!open.empty()) {
    const OpenEntry top = open.top();
    open.pop();
    if (closed[top.lin]) continue;
    closed[top.lin] = 1;
    if (top.lin == t) {
      found = true;
      break;
    }
    const Index3 cur = grid.Unlinear(top.lin);

    static const std::vector<Index3> all_dirs(NeighborOffsets26().begin(),
                                              NeighborOffsets26().end());
    const std::vector<Index3> &dirs =
        parent[top.lin] < 0 || jps.NearBlocked(top.lin)
            ? all_dirs
            : Jps::SubDirections(SignOf(cur - grid.Unlinear(parent[top.lin])));

    for (const Index3 &d : dirs) {
      int steps = 0;
      const std::optional<Index3> jp = jps.Jump(cur, d, steps);
      if (!jp) continue;
      const int64_t jl = grid.Linear(*jp);
      if (closed[jl]) continue;
      StepCounts c = counts[top.lin];
      AddSteps(c, StepClass(d), steps);
      const double ng = c.Length(vs);
      if (ng < g[jl]) {
        g[jl] = ng;
        counts[jl] = c;
        parent[jl] = top.lin;
        open.push({ng + OctileDistance(*jp, goal, vs), ng, jl});
      }
    }
  }
  if (!found) return std::nullopt;

  // expand jump segments into unit steps
  std::vector<Index3> jumps;
  for (int64_t cur = t; cur >= 0; cur = parent[cur]) {
    jumps.push_back(grid.Unlinear(cur));
  }
  std::reverse(jumps.begin(), jumps.end());
  std::vector<Index3> voxels = {jumps.front()};
  for (size_t i = 1; i < jumps.size(); ++i) {
    const Index3 d = SignOf(jumps[i] - jumps[i - 1]);
    Index3 cur = jumps[i - 1];
    while (cur != jumps[i]) {
      cur += d;
      voxels.push_back(cur);
    }
  }
  GridPath path = MakeGridPath(grid, std::move(voxels));
  path.length = g[t];
  return path;
}

std::optional<GridPath> JpsSearch(const VoxelGrid &grid, const Index3 &start,
                                  const Index3 &goal) {
  std::vector<uint8_t> mask(grid.size());
  for (int64_t i = 0; i < grid.size(); ++i) {
    mask[i] = grid.Get(i) == VoxelState::kFree;
  }
  return JpsSearch(grid, mask, start, goal);
}

double PenalizedCost(const VoxelGrid &grid, const DistanceField &field,
                     const std::vector<Index3> &voxels, double push_dist,
                     double weight) {
  const double vs = grid.voxel_size();
  double cost = 0.0;
  for (size_t i = 1; i < voxels.size(); ++i) {
    const int cls = StepClass(voxels[i] - voxels[i - 1]);
    const double step = cls == 1 ? vs : cls == 2 ? vs * kSqrt2 : vs * kSqrt3;
    const double clearance = field.At(grid.Linear(voxels[i]));
    cost += step + weight * std::max(0.0, push_dist - clearance);
  }
  return cost;
}

GridPath DmpPush(const VoxelGrid &grid, const std::vector<uint8_t> &traversable,
                 const DistanceField &field, const GridPath &jps_path,
                 double push_dist, double weight) {
  if (jps_path.voxels.size() <= 1) return jps_path;
  bool penalized = false;
  for (size_t i = 1; i < jps_path.voxels.size(); ++i) {
    if (field.At(grid.Linear(jps_path.voxels[i])) < push_dist) {
      penalized = true;
      break;
    }
  }
  if (!penalized || weight <= 0.0) return jps_path;

  const double vs = grid.voxel_size();
  const Index3 start = jps_path.voxels.front();
  const Index3 goal = jps_path.voxels.back();
  const int64_t n = grid.size();
  std::vector<double> g(n, std::numeric_limits<double>::infinity());
  std::vector<int64_t> parent(n, -1);
  std::vector<uint8_t> closed(n, 0);
  const int64_t s = grid.Linear(start);
  const int64_t t = grid.Linear(goal);
  const double step_len[4] = {0.0, vs, vs * kSqrt2, vs * kSqrt3};

  g[s] = 0.0;
  OpenList open;
  open.push({OctileDistance(start, goal, vs), 0.0, s});
  while (!open.empty()) {
    const OpenEntry top = open.top();
    open.pop();
    if (closed[top.lin]) continue;
    closed[top.lin] = 1;
    if (top.lin == t) break;
    const Index3 cur = grid.Unlinear(top.lin);
    for (const Index3 &o : NeighborOffsets26()) {
      const Index3 nb = cur + o;
      if (!grid.Contains(nb)) continue;
      const int64_t nl = grid.Linear(nb);
      if (!traversable[nl] || closed[nl]) continue;
      const double ng = g[top.lin] + step_len[StepClass(o)] +
                        weight * std::max(0.0, push_dist - field.At(nl));
      if (ng < g[nl]) {
        g[nl] = ng;
        parent[nl] = top.lin;
        open.push({ng + OctileDistance(nb, goal, vs), ng, nl});
      }
    }
  }
  if (!closed[t]) return jps_path;  // cannot happen when the masks agree

  std::vector<Index3> voxels;
  for (int64_t cur = t; cur >= 0; cur = parent[cur]) {
    voxels.push_back(grid.Unlinear(cur));
  }
  std::reverse(voxels.begin(), voxels.end());
  return MakeGridPath(grid, std::move(voxels));
}

std::optional<Index3> NearestInMask(const VoxelGrid &grid,
                                    const std::vector<uint8_t> &mask,
                                    const Index3 &idx, int radius) {
  std::optional<Index3> best;
  int64_t best_d2 = std::numeric_limits<int64_t>::max();
  int64_t best_lin = 0;
  for (int dz = -radius; dz <= radius; ++dz) {
    for (int dy = -radius; dy <= radius; ++dy) {
      for (int dx = -radius; dx <= radius; ++dx) {
        const Index3 c = idx + Index3(dx, dy, dz);
        if (!grid.Contains(c)) continue;
        const int64_t lin = grid.Linear(c);
        if (!mask[lin]) continue;
        const int64_t d2 = int64_t(dx) * dx + int64_t(dy) * dy +
                           int64_t(dz) * dz;
        if (d2 < best_d2 || (d2 == best_d2 && lin < best_lin)) {
          best_d2 = d2;
          best_lin = lin;
          best = c;
        }
      }
    }
  }
  return best;
}

std::vector<uint8_t> ReachableSet(const VoxelGrid &grid,
                                  const std::vector<Index3> &seeds,
                                  int inflation) {
  const std::vector<uint8_t> traversable = ComputeTraversable(grid, inflation);
  std::vector<uint8_t> reached(grid.size(), 0);
  std::vector<int64_t> stack;
  for (const Index3 &seed : seeds) {
    std::optional<Index3> s;
    if (grid.Contains(seed) && traversable[grid.Linear(seed)]) {
      s = seed;
    } else {
      s = NearestInMask(grid, traversable, seed, 2);
    }
    if (!s) continue;
    const int64_t lin = grid.Linear(*s);
    if (reached[lin]) continue;
    reached[lin] = 1;
    stack.push_back(lin);
  }
  while (!stack.empty()) {
    const int64_t cur = stack.back();
    stack.pop_back();
    const Index3 ci = grid.Unlinear(cur);
    for (const Index3 &o : NeighborOffsets26()) {
      const Index3 nb = ci + o;
      if (!grid.Contains(nb)) continue;
      const int64_t nl = grid.Linear(nb);
      if (traversable[nl] && !reached[nl]) {
        reached[nl] = 1;
        stack.push_back(nl);
      }
    }
  }
  if (inflation <= 0) return reached;
  // the agent body sweeps the inflation margin around every reached center
  std::vector<uint8_t> out = DilateMask(grid.dims(), reached, inflation);
  for (int64_t i = 0; i < grid.size(); ++i) {
    if (grid.Get(i) != VoxelState::kFree) out[i] = 0;
  }
  return out;
}

std::optional<Index3> IntermediateGoal(const VoxelGrid &grid,
                                       const Vec3 &agent_position,
                                       const Vec3 &global_goal,
                                       const std::vector<uint8_t> *mask) {
  std::vector<uint8_t> free_mask;
  if (mask == nullptr) {
    free_mask.resize(grid.size());
    for (int64_t i = 0; i < grid.size(); ++i) {
      free_mask[i] = grid.Get(i) == VoxelState::kFree;
    }
    mask = &free_mask;
  }

  const Index3 goal_idx = grid.PointToIndex(global_goal);
  Index3 target;
  if (grid.Contains(goal_idx)) {
    target = goal_idx;
  } else {
    // exit point of the segment from the box shrunk to the centers of the
    // second voxel layer
    const double vs = grid.voxel_size();
    const Index3 &d = grid.dims();
    Vec3 lo, hi;
    for (int i = 0; i < 3; ++i) {
      const double inset = d[i] >= 3 ? 1.5 * vs : 0.5 * d[i] * vs;
      lo[i] = grid.extent_min()[i] + inset;
      hi[i] = grid.extent_max()[i] - inset;
    }
    const Vec3 p = agent_position.cwiseMax(lo).cwiseMin(hi);
    const Vec3 dir = global_goal - p;
    double t_exit = 1.0;
    for (int i = 0; i < 3; ++i) {
      if (dir[i] > 0.0) t_exit = std::min(t_exit, (hi[i] - p[i]) / dir[i]);
      if (dir[i] < 0.0) t_exit = std::min(t_exit, (lo[i] - p[i]) / dir[i]);
    }
    t_exit = std::max(t_exit, 0.0);
    const Vec3 exit = p + t_exit * dir;
    target = grid.PointToIndex(exit);
    for (int i = 0; i < 3; ++i) {
      const int lo_i = d[i] >= 3 ? 1 : 0;
      const int hi_i = d[i] >= 3 ? d[i] - 2 : d[i] - 1;
      target[i] = std::clamp(target[i], lo_i, hi_i);
    }
  }
  if ((*mask)[grid.Linear(target)]) return target;
  return NearestInMask(grid, *mask, target, 5);
}

}  // namespace explore
