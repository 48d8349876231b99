#pragma once

#include <optional>
#include <vector>

#include "core/corridor.hpp"
#include "core/dynamics.hpp"
#include "core/miqp.hpp"
#include "core/voxel_grid.hpp"

namespace explore {

struct PlannerParams {
  MpcParams mpc;
  // extra clearance the path refinement tries to keep beyond d_rad
  double dmp_push = 0.6;
  double dmp_weight = 10.0;
  // neighbors whose current position is farther than this are ignored
  double cutoff = 1e9;
};

// Everything one planning iteration needs, as a snapshot.
struct PlanRequest {
  const VoxelGrid *local = nullptr;
  int64_t start_ms = 0;     // time of the new plan's first point
  DiscreteState x0;
  std::optional<Vec3> goal;
  // own plan that is active one period before start_ms
  const Trajectory *previous = nullptr;
  // neighbors sampled on the previous plan's time grid
  std::vector<NeighborPrediction> neighbors;
  // last reference, null after a goal change
  const std::vector<DiscreteState> *previous_reference = nullptr;
};

enum class PlanOutcome { kSolved, kFallback };

struct PlanResult {
  PlanOutcome outcome = PlanOutcome::kFallback;
  Trajectory trajectory;
  std::vector<DiscreteState> reference;
  std::vector<Vec3> path;  // refined path waypoints, empty when hovering
  // the goal (or the closest reachable voxel to it) is the start voxel
  bool at_goal = false;
  MiqpStats stats;
  double solve_ms = 0.0;  // wall time of the MIQP call
};

// One receding-horizon iteration: path to the (intermediate) goal, distance
// map refinement, corridor, time-aware constraints, reference sampling and
// the MIQP. Falls back to braking along the previous plan when no
// trajectory is found.
PlanResult PlanIteration(const PlannerParams &params, const PlanRequest &req);

// shifted binary pattern of a plan, used to seed the next solve
std::vector<std::vector<uint8_t>> ShiftedBinaries(const Trajectory &traj);

// reference advanced by one step (last state repeated) so that a reference
// kept by the next plan stays fixed in absolute time
std::vector<DiscreteState> ShiftedReference(
    const std::vector<DiscreteState> &reference);

}  // namespace explore
