#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "harness/config.hpp"

namespace explore {

enum class RunStatus { kComplete, kSafetyViolation, kTimeout };

const char *RunStatusName(RunStatus status);

struct AgentMetrics {
  int id = 0;
  double flight_distance = 0.0;  // m, polyline of the per-tick positions
  double moving_time = 0.0;      // s with nonzero speed
  double mean_velocity = 0.0;    // distance / moving time
  int plans = 0;
  int fallbacks = 0;
  int node_limit_hits = 0;
  int goal_failures = 0;
  int64_t nodes = 0;
  int64_t qp_iterations = 0;
  // wall clock, never used for decisions
  std::vector<double> plan_ms;   // whole planning iteration
  std::vector<double> solve_ms;  // MIQP only
  int overruns = 0;              // iterations longer than the period
};

struct RunResult {
  uint64_t seed = 0;
  int agents = 0;
  RunStatus status = RunStatus::kComplete;
  std::string message;
  double exploration_time = 0.0;  // s of simulated time
  double min_pair_distance = 0.0;  // infinity for one agent
  std::optional<double> safety_ratio;
  double min_obstacle_clearance = 0.0;
  int64_t total_voxels = 0;
  int64_t unknown_voxels = 0;
  // unknown voxels next to free space an agent can reach and that was never
  // given up on; zero after a completed run
  int64_t unknown_reachable = 0;
  // unknown voxels only next to reachable free space the hub gave up on
  // after a goal there failed
  int64_t unknown_flagged = 0;
  int64_t blacklisted_voxels = 0;
  int64_t map_mismatches = 0;  // global voxels that contradict the truth
  int unknown_increases = 0;   // hub merges after which more was unknown
  int local_updates = 0;
  int global_updates = 0;
  double wall_time = 0.0;
  std::vector<AgentMetrics> agent_metrics;
};

// Runs one exploration to termination, a safety violation or a time cap.
// When out_dir is not empty it receives world.txt, metrics.csv, timing.csv,
// clusters.txt, global_map.vxgd and (if enabled) trajectory.csv.
RunResult RunSimulation(const Config &config, uint64_t seed, int agents,
                        const std::string &out_dir);

// deterministic per-agent rows; no wall-clock values
std::string FormatMetricsCsv(const RunResult &result);
// wall-clock statistics per agent
std::string FormatTimingCsv(const RunResult &result);

struct Stats {
  double mean = 0.0;
  double max = 0.0;
  double std = 0.0;  // population standard deviation
};
Stats ComputeStats(const std::vector<double> &values);

}  // namespace explore
