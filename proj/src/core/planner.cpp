#include "core/planner.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

#include "core/distance_field.hpp"
#include "core/path_search.hpp"
#include "core/reference.hpp"

namespace explore {

namespace {

// start voxel for the search: the agent's voxel, or the nearest traversable
// voxel next to it
std::optional<Index3> SnapStart(const VoxelGrid &grid,
                                const std::vector<uint8_t> &traversable,
                                const Vec3 &p) {
  const Index3 idx = grid.PointToIndex(p);
  if (!grid.Contains(idx)) return std::nullopt;
  if (traversable[grid.Linear(idx)]) return idx;
  return NearestInMask(grid, traversable, idx, 2);
}

// path to the goal, or to the reachable voxel closest to it
std::optional<GridPath> BestEffortPath(const VoxelGrid &grid,
                                       const std::vector<uint8_t> &traversable,
                                       const Index3 &start,
                                       const Index3 &goal) {
  if (auto path = JpsSearch(grid, traversable, start, goal)) return path;
  const std::vector<uint8_t> reach = ReachableSet(grid, {start}, 0);
  const Vec3 g = grid.Center(goal);
  int64_t best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int64_t i = 0; i < grid.size(); ++i) {
    if (!reach[i] || !traversable[i]) continue;
    const double d = (grid.Center(i) - g).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  if (best < 0) return std::nullopt;
  return JpsSearch(grid, traversable, start, grid.Unlinear(best));
}

}  // namespace

std::vector<std::vector<uint8_t>> ShiftedBinaries(const Trajectory &traj) {
  std::vector<std::vector<uint8_t>> out;
  if (traj.binaries.empty()) return out;
  for (size_t k = 1; k < traj.binaries.size(); ++k) {
    out.push_back(traj.binaries[k]);
  }
  out.push_back(traj.binaries.back());
  return out;
}

std::vector<DiscreteState> ShiftedReference(
    const std::vector<DiscreteState> &reference) {
  if (reference.empty()) return {};
  std::vector<DiscreteState> out(reference.begin() + 1, reference.end());
  out.push_back(reference.back());
  return out;
}

PlanResult PlanIteration(const PlannerParams &params, const PlanRequest &req) {
  const VoxelGrid &grid = *req.local;
  const MpcParams &mpc = params.mpc;
  PlanResult result;

  auto fallback = [&]() {
    result.outcome = PlanOutcome::kFallback;
    if (req.previous != nullptr) {
      result.trajectory = FallbackBrake(*req.previous);
    } else {
      result.trajectory = HoverTrajectory(
          req.x0.p, req.start_ms, std::llround(mpc.h * 1000.0), mpc.N);
    }
    result.trajectory.start_ms = req.start_ms;
    return result;
  };

  const int inflation = InflationVoxels(mpc.d_rad, grid.voxel_size());
  const std::vector<uint8_t> traversable = ComputeTraversable(grid, inflation);

  // path: hover in place without a goal or a usable start voxel
  const Index3 here = grid.PointToIndex(req.x0.p);
  if (!grid.Contains(here) || grid.Get(here) != VoxelState::kFree) {
    return fallback();
  }
  GridPath path = MakeGridPath(grid, {here});
  bool hovering = true;
  const std::optional<Index3> start = SnapStart(grid, traversable, req.x0.p);
  if (req.goal && start) {
    const std::optional<Index3> goal =
        IntermediateGoal(grid, req.x0.p, *req.goal, &traversable);
    if (goal) {
      if (auto found = BestEffortPath(grid, traversable, *start, *goal)) {
        const DistanceField field = ComputeDistanceField(grid);
        path = DmpPush(grid, traversable, field, *found,
                       params.dmp_push + mpc.d_rad, params.dmp_weight);
        hovering = found->voxels.size() == 1;
        result.at_goal = hovering;
      }
    }
  }

  std::vector<Polyhedron> corridor;
  try {
    corridor = BuildCorridor(grid, path, mpc.p_hor, mpc.d_rad, &req.x0.p);
  } catch (const Error &) {
    return fallback();
  }

  // reference: a new one on goal change or when the agent keeps up
  std::vector<Vec3> line = path.waypoints;
  if (hovering) line.assign(1, req.x0.p);
  const Vec3 x_n_pred = req.previous != nullptr
                            ? req.previous->states.back().p
                            : req.x0.p;
  const std::vector<DiscreteState> *prev_ref =
      hovering ? nullptr : req.previous_reference;
  result.reference =
      SampleReference(line, req.x0, corridor, mpc, prev_ref, x_n_pred);
  if (!hovering) result.path = path.waypoints;

  std::vector<Vec3> own_pred;
  if (req.previous != nullptr) {
    for (const DiscreteState &s : req.previous->states) own_pred.push_back(s.p);
  } else {
    own_pred.assign(mpc.N + 1, req.x0.p);
  }
  const TimeAwareCorridor tac =
      AssembleTimeAware(corridor, own_pred, req.neighbors, params.cutoff);

  MpcParams solve_params = mpc;
  const Vec3 extent = grid.extent_max() - grid.extent_min();
  solve_params.big_m = std::max(mpc.big_m, extent.norm());
  std::vector<std::vector<uint8_t>> seed;
  if (req.previous != nullptr) seed = ShiftedBinaries(*req.previous);
  const auto t0 = std::chrono::steady_clock::now();
  const auto solution =
      SolveMiqp(solve_params, req.x0, result.reference, tac,
                seed.empty() ? nullptr : &seed, &result.stats);
  result.solve_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
  if (!solution) return fallback();

  result.outcome = PlanOutcome::kSolved;
  result.trajectory = solution->trajectory;
  result.trajectory.start_ms = req.start_ms;
  return result;
}

}  // namespace explore
