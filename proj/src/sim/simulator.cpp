#include "sim/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <limits>

#include "core/distance_field.hpp"
#include "core/frontier.hpp"
#include "core/mapping.hpp"
#include "core/path_search.hpp"
#include "sim/bus.hpp"

namespace explore {

const char *RunStatusName(RunStatus status) {
  switch (status) {
    case RunStatus::kComplete:
      return "complete";
    case RunStatus::kSafetyViolation:
      return "safety_violation";
    case RunStatus::kTimeout:
      return "timeout";
  }
  return "unknown";
}

Stats ComputeStats(const std::vector<double> &values) {
  Stats s;
  if (values.empty()) return s;
  double sum = 0.0;
  s.max = values.front();
  for (double v : values) {
    sum += v;
    s.max = std::max(s.max, v);
  }
  s.mean = sum / values.size();
  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(var / values.size());
  return s;
}

namespace {

constexpr double kSafetyTol = 1e-9;
// plans spent on the goal voxel before it is reported as unobservable
constexpr int kAtGoalPlans = 5;

struct MapUpload {
  int agent = 0;
  VoxelGrid local;
  Vec3 position = Vec3::Zero();
  std::optional<Vec3> failed_goal;
};

struct GoalMessage {
  int agent = 0;
  std::optional<Vec3> goal;
};

struct TrajectoryMessage {
  int sender = 0;
  Trajectory trajectory;
};

struct Agent {
  int id = 0;
  Trajectory active;
  std::optional<Trajectory> pending;
  DiscreteState state;
  VoxelGrid local;

  std::optional<Vec3> goal;
  std::vector<DiscreteState> reference;
  bool has_reference = false;
  double best_goal_distance = std::numeric_limits<double>::infinity();
  int stalled_plans = 0;
  int plans_at_goal = 0;
  std::optional<Vec3> failed_goal;

  // latest trajectories received from each other agent, oldest first
  std::vector<std::deque<Trajectory>> known;

  AgentMetrics metrics;
};

struct Hub {
  VoxelGrid global;
  std::vector<MapUpload> inbox;
  std::vector<Vec3> positions;
  std::vector<uint8_t> merged_once;
  std::vector<uint8_t> blacklist;
  std::vector<Cluster> clusters;
  uint64_t round = 0;
};

class Simulation {
 public:
  Simulation(const Config &config, uint64_t seed, int agents)
      : cfg_(config),
        mpc_(config.planner.mpc),
        period_ms_(1000 / config.planning_hz),
        lidar_ms_(1000 / config.local_map_hz),
        hub_ms_(1000 / config.global_map_hz),
        uploads_(config.bus_delay_ms),
        goals_(config.bus_delay_ms),
        broadcasts_(config.bus_delay_ms) {
    result_.seed = seed;
    result_.agents = agents;
    const double vs = config.world.voxel_size;
    Index3 local_dims;
    for (int i = 0; i < 3; ++i) {
      local_dims[i] =
          static_cast<int>(std::ceil(config.local_size[i] / vs - 1e-9));
    }
    // start height: the voxel that puts the local grid floor at z = 0
    std::vector<Vec3> starts = StartPositions(agents, vs);
    for (Vec3 &s : starts) s.z() = ((local_dims.z() - 1) / 2 + 0.5) * vs;
    world_ = GenerateWorld(seed, config.world, starts);
    result_.total_voxels = world_.truth.size();
    inflation_ = InflationVoxels(mpc_.d_rad, vs);
    step_ms_ = std::llround(mpc_.h * 1000.0);

    planner_ = config.planner;
    planner_.cutoff = (local_dims.cast<double>() * vs).norm();

    hub_.global = VoxelGrid(Index3::Zero(), world_.truth.dims(), vs);
    hub_.positions = starts;
    hub_.merged_once.assign(agents, 0);
    hub_.blacklist.assign(hub_.global.size(), 0);

    for (int i = 0; i < agents; ++i) {
      Agent a;
      a.id = i;
      a.active = HoverTrajectory(starts[i], 0, step_ms_, mpc_.N);
      a.state = a.active.Evaluate(0);
      a.local = Recenter(VoxelGrid(Index3::Zero(), local_dims, vs), starts[i]);
      a.metrics.id = i;
      agents_.push_back(std::move(a));
    }
    // everybody knows the others' initial hover plans
    for (Agent &a : agents_) {
      a.known.resize(agents);
      for (const Agent &b : agents_) {
        if (b.id != a.id) a.known[b.id].push_back(b.active);
      }
    }
    result_.min_pair_distance = std::numeric_limits<double>::infinity();
    result_.min_obstacle_clearance = std::numeric_limits<double>::infinity();
  }

  RunResult Run(std::FILE *trajectory_log) {
    const auto wall_start = std::chrono::steady_clock::now();
    const int64_t max_ms = std::llround(cfg_.max_sim_time_s * 1000.0);
    bool done = false;
    for (int64_t t = 0; !done; t += cfg_.dt_ms) {
      Deliver(t);
      for (Agent &a : agents_) {
        if (a.pending && a.pending->start_ms == t) {
          a.active = std::move(*a.pending);
          a.pending.reset();
        }
        a.state = a.active.Evaluate(t);
      }
      if (t % lidar_ms_ == 0) UpdateLocalMaps(t);
      if (t % hub_ms_ == 0 && HubStep(t)) {
        result_.status = RunStatus::kComplete;
        result_.exploration_time = t / 1000.0;
        done = true;
      }
      if (!done) {
        for (Agent &a : agents_) {
          if (t % period_ms_ == Offset(a.id)) Plan(a, t);
        }
      }
      Record(t, trajectory_log);
      if (!CheckSafety(t)) {
        result_.status = RunStatus::kSafetyViolation;
        result_.exploration_time = t / 1000.0;
        done = true;
      }
      const double wall = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - wall_start)
                              .count();
      if (!done && (t >= max_ms || wall > cfg_.wall_cap_s)) {
        result_.status = RunStatus::kTimeout;
        result_.message = t >= max_ms ? "simulated time cap reached"
                                      : "wall-clock cap reached";
        result_.exploration_time = t / 1000.0;
        done = true;
      }
    }
    Finish();
    result_.wall_time = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - wall_start)
                            .count();
    return result_;
  }

  const WorldModel &world() const { return world_; }
  const Hub &hub() const { return hub_; }

 private:
  int64_t Offset(int id) const {
    return (static_cast<int64_t>(cfg_.dt_ms) * id) % period_ms_;
  }

  void Deliver(int64_t t) {
    broadcasts_.Deliver(t, [&](TrajectoryMessage &m) {
      for (Agent &a : agents_) {
        if (a.id == m.sender) continue;
        auto &q = a.known[m.sender];
        q.push_back(m.trajectory);
        while (q.size() > 4) q.pop_front();
      }
    });
    uploads_.Deliver(t, [&](MapUpload &m) { hub_.inbox.push_back(std::move(m)); });
    goals_.Deliver(t, [&](GoalMessage &m) {
      Agent &a = agents_[m.agent];
      const bool same = a.goal.has_value() == m.goal.has_value() &&
                        (!a.goal || (*a.goal - *m.goal).norm() < 1e-12);
      if (same) return;
      a.goal = m.goal;
      a.has_reference = false;
      a.best_goal_distance = std::numeric_limits<double>::infinity();
      a.stalled_plans = 0;
      a.plans_at_goal = 0;
    });
  }

  // position of another agent as known from its broadcast plans
  Vec3 KnownPosition(const Agent &a, int other, int64_t t) const {
    const auto &q = a.known[other];
    for (auto it = q.rbegin(); it != q.rend(); ++it) {
      if (it->start_ms <= t) return it->Evaluate(t).p;
    }
    return q.front().Evaluate(t).p;
  }

  void UpdateLocalMaps(int64_t t) {
    ++result_.local_updates;
    for (Agent &a : agents_) {
      std::vector<Vec3> others_truth, others_known;
      for (const Agent &b : agents_) {
        if (b.id == a.id) continue;
        others_truth.push_back(b.state.p);
        others_known.push_back(KnownPosition(a, b.id, t));
      }
      const PointCloud cloud = SenseLidar(world_, a.state.p, others_truth,
                                          cfg_.lidar_range, mpc_.d_rad);
      a.local = Recenter(a.local, a.state.p);
      IntegrateScan(a.local, cloud, others_known, cfg_.removal_radius);
      MapUpload up;
      up.agent = a.id;
      up.local = a.local;
      up.position = a.state.p;
      up.failed_goal = a.failed_goal;
      a.failed_goal.reset();
      uploads_.Send(t, std::move(up));
    }
  }

  // merge, goals and termination; returns true when exploration is over
  bool HubStep(int64_t t) {
    ++result_.global_updates;
    std::vector<Vec3> failures;
    for (MapUpload &m : hub_.inbox) {
      MergeLocalIntoGlobal(hub_.global, m.local, cfg_.static_env);
      hub_.positions[m.agent] = m.position;
      hub_.merged_once[m.agent] = 1;
      if (m.failed_goal) failures.push_back(*m.failed_goal);
    }
    hub_.inbox.clear();
    const int64_t unknown = hub_.global.Count(VoxelState::kUnknown);
    if (unknown > last_unknown_) ++result_.unknown_increases;
    last_unknown_ = unknown;
    if (std::find(hub_.merged_once.begin(), hub_.merged_once.end(), 0) !=
        hub_.merged_once.end()) {
      return false;
    }

    const VoxelGrid &g = hub_.global;
    std::vector<Index3> seeds;
    for (const Vec3 &p : hub_.positions) seeds.push_back(g.PointToIndex(p));
    std::vector<uint8_t> reachable = ReachableSet(g, seeds, inflation_);
    hub_.clusters = ClusterBorders(g, FindBorderVoxels(g));

    // a goal that an agent could not approach takes its cluster out
    for (const Vec3 &f : failures) {
      const Index3 idx = g.PointToIndex(f);
      if (!g.Contains(idx)) continue;
      const int64_t lin = g.Linear(idx);
      hub_.blacklist[lin] = 1;
      for (const Cluster &c : hub_.clusters) {
        if (std::binary_search(c.members.begin(), c.members.end(), lin)) {
          for (int64_t m : c.members) hub_.blacklist[m] = 1;
        }
      }
    }
    for (int64_t i = 0; i < g.size(); ++i) {
      if (hub_.blacklist[i]) reachable[i] = 0;
    }

    std::vector<Vec3> goals;
    for (const Cluster &c : hub_.clusters) {
      const bool live = std::any_of(c.members.begin(), c.members.end(),
                                    [&](int64_t m) { return reachable[m] != 0; });
      if (live) goals.push_back(g.Center(c.potential_goal));
    }
    if (ExplorationComplete(g, reachable)) return true;

    const GoalAssignment assignment =
        AssignGoals(hub_.positions, goals, ++hub_.round);
    for (size_t i = 0; i < agents_.size(); ++i) {
      goals_.Send(t, GoalMessage{static_cast<int>(i), assignment.goals[i]});
    }
    return false;
  }

  void Plan(Agent &a, int64_t t) {
    const auto wall_start = std::chrono::steady_clock::now();
    const int64_t start_ms = t - Offset(a.id) + period_ms_;
    const int64_t pred_start = start_ms - period_ms_;

    PlanRequest req;
    req.local = &a.local;
    req.start_ms = start_ms;
    req.x0 = a.active.Evaluate(start_ms);
    req.goal = a.goal;
    req.previous = &a.active;
    req.previous_reference = a.has_reference ? &a.reference : nullptr;
    const double v_max = (mpc_.a_max.cwiseQuotient(mpc_.drag)).maxCoeff();
    for (const Agent &b : agents_) {
      if (b.id == a.id) continue;
      const auto &q = a.known[b.id];
      const Trajectory *pick = &q.front();
      for (const Trajectory &tr : q) {
        if (tr.start_ms <= pred_start) pick = &tr;
      }
      NeighborPrediction pred;
      const double stale =
          std::max<int64_t>(0, pred_start - pick->start_ms) / 1000.0;
      pred.d_rad = mpc_.d_rad + v_max * stale;
      for (int k = 0; k <= mpc_.N; ++k) {
        pred.positions.push_back(pick->Evaluate(pred_start + k * step_ms_).p);
      }
      req.neighbors.push_back(std::move(pred));
    }

    PlanResult res = PlanIteration(planner_, req);
    AgentMetrics &m = a.metrics;
    ++m.plans;
    if (res.outcome == PlanOutcome::kFallback) ++m.fallbacks;
    if (res.stats.node_limit) ++m.node_limit_hits;
    m.nodes += res.stats.nodes;
    m.qp_iterations += res.stats.qp_iterations;
    if (res.outcome == PlanOutcome::kSolved) {
      a.reference = ShiftedReference(res.reference);
      a.has_reference = !res.path.empty();
    }

    // progress watchdog on the current goal; sitting on it without the
    // frontier going away also counts as a failure
    if (a.goal && res.at_goal) {
      if (++a.plans_at_goal >= kAtGoalPlans) {
        a.failed_goal = a.goal;
        ++m.goal_failures;
        a.plans_at_goal = 0;
      }
    } else {
      a.plans_at_goal = 0;
    }
    if (a.goal) {
      const double d = (req.x0.p - *a.goal).norm();
      if (d < a.best_goal_distance - cfg_.stall_progress) {
        a.best_goal_distance = d;
        a.stalled_plans = 0;
      } else if (++a.stalled_plans >= cfg_.stall_plans) {
        a.failed_goal = a.goal;
        ++m.goal_failures;
        a.stalled_plans = 0;
        a.best_goal_distance = d;
      }
    }

    a.pending = res.trajectory;
    broadcasts_.Send(t, TrajectoryMessage{a.id, res.trajectory});

    const double wall = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - wall_start)
                            .count();
    m.plan_ms.push_back(wall);
    m.solve_ms.push_back(res.solve_ms);
    if (wall > period_ms_) ++m.overruns;
  }

  void Record(int64_t t, std::FILE *log) {
    for (Agent &a : agents_) {
      if (t > 0) {
        const double step = (a.state.p - last_p_[a.id]).norm();
        a.metrics.flight_distance += step;
        if (step > 0.0) a.metrics.moving_time += cfg_.dt_ms / 1000.0;
      }
      last_p_[a.id] = a.state.p;
      if (log != nullptr) {
        const DiscreteState &s = a.state;
        std::fprintf(log,
                     "%.3f,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                     "%.17g\n",
                     t / 1000.0, a.id, s.p.x(), s.p.y(), s.p.z(), s.v.x(),
                     s.v.y(), s.v.z(), s.a.x(), s.a.y(), s.a.z());
      }
    }
  }

  double ObstacleClearance(const Vec3 &p) const {
    const VoxelGrid &truth = world_.truth;
    const double vs = truth.voxel_size();
    const int r = static_cast<int>(std::ceil(mpc_.d_rad / vs)) + 1;
    const Index3 c = truth.PointToIndex(p);
    double best = std::numeric_limits<double>::infinity();
    for (int z = c.z() - r; z <= c.z() + r; ++z) {
      for (int y = c.y() - r; y <= c.y() + r; ++y) {
        for (int x = c.x() - r; x <= c.x() + r; ++x) {
          const Index3 idx(x, y, z);
          if (!truth.Contains(idx) || truth.Get(idx) != VoxelState::kOccupied) {
            continue;
          }
          const Vec3 lo = idx.cast<double>() * vs;
          const Vec3 hi = lo + Vec3::Constant(vs);
          const Vec3 q = p.cwiseMax(lo).cwiseMin(hi);
          best = std::min(best, (p - q).norm());
        }
      }
    }
    return best;
  }

  bool CheckSafety(int64_t t) {
    bool ok = true;
    char buf[160];
    for (size_t i = 0; i < agents_.size(); ++i) {
      const Vec3 &p = agents_[i].state.p;
      const double clear = ObstacleClearance(p);
      result_.min_obstacle_clearance =
          std::min(result_.min_obstacle_clearance, clear);
      if (ok && clear < mpc_.d_rad - kSafetyTol) {
        std::snprintf(buf, sizeof(buf),
                      "agent %zu within %.4f m of an obstacle at t=%.3f", i,
                      clear, t / 1000.0);
        result_.message = buf;
        ok = false;
      }
      for (size_t j = i + 1; j < agents_.size(); ++j) {
        const double d = (p - agents_[j].state.p).norm();
        result_.min_pair_distance = std::min(result_.min_pair_distance, d);
        if (ok && d < 2.0 * mpc_.d_rad - kSafetyTol) {
          std::snprintf(buf, sizeof(buf),
                        "agents %zu and %zu are %.4f m apart at t=%.3f", i, j,
                        d, t / 1000.0);
          result_.message = buf;
          ok = false;
        }
      }
    }
    return ok;
  }

  void Finish() {
    // fold in maps that were uploaded but not merged yet
    for (MapUpload &m : hub_.inbox) {
      MergeLocalIntoGlobal(hub_.global, m.local, cfg_.static_env);
    }
    hub_.inbox.clear();
    const VoxelGrid &g = hub_.global;
    std::vector<Index3> seeds;
    for (const Agent &a : agents_) seeds.push_back(g.PointToIndex(a.state.p));
    std::vector<uint8_t> reachable = ReachableSet(g, seeds, inflation_);
    result_.unknown_voxels = g.Count(VoxelState::kUnknown);
    const int64_t touching = CountReachableUnknown(g, reachable);
    for (int64_t i = 0; i < g.size(); ++i) {
      if (hub_.blacklist[i]) reachable[i] = 0;
    }
    result_.unknown_reachable = CountReachableUnknown(g, reachable);
    result_.unknown_flagged = touching - result_.unknown_reachable;
    result_.blacklisted_voxels =
        std::count(hub_.blacklist.begin(), hub_.blacklist.end(), 1);
    for (int64_t i = 0; i < g.size(); ++i) {
      const VoxelState s = g.Get(i);
      if (s != VoxelState::kUnknown && s != world_.truth.Get(i)) {
        ++result_.map_mismatches;
      }
    }
    if (agents_.size() > 1) {
      result_.safety_ratio = result_.min_pair_distance / (2.0 * mpc_.d_rad);
    }
    for (Agent &a : agents_) {
      AgentMetrics &m = a.metrics;
      m.mean_velocity =
          m.moving_time > 0.0 ? m.flight_distance / m.moving_time : 0.0;
      result_.agent_metrics.push_back(m);
    }
  }

  const Config &cfg_;
  const MpcParams &mpc_;
  PlannerParams planner_;
  int64_t period_ms_;
  int64_t lidar_ms_;
  int64_t hub_ms_;
  int64_t step_ms_ = 100;
  int inflation_ = 1;
  int64_t last_unknown_ = std::numeric_limits<int64_t>::max();
  WorldModel world_;
  Hub hub_;
  std::vector<Agent> agents_;
  std::vector<Vec3> last_p_ = std::vector<Vec3>(64, Vec3::Zero());
  Channel<MapUpload> uploads_;
  Channel<GoalMessage> goals_;
  Channel<TrajectoryMessage> broadcasts_;
  RunResult result_;
};

void WriteText(const std::filesystem::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
}

std::string Fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string FormatMetricsCsv(const RunResult &r) {
  std::string out =
      "seed,agents,agent_id,status,exploration_time_s,flight_distance_m,"
      "mean_velocity_mps,moving_time_s,plans,fallbacks,node_limit_hits,"
      "goal_failures,nodes,qp_iterations,safety_ratio,min_pair_distance_m,"
      "min_obstacle_clearance_m,total_voxels,unknown_voxels,unknown_reachable,"
      "unknown_flagged,blacklisted_voxels,map_mismatches\n";
  for (const AgentMetrics &m : r.agent_metrics) {
    out += std::to_string(r.seed) + "," + std::to_string(r.agents) + "," +
           std::to_string(m.id) + "," + RunStatusName(r.status) + "," +
           Fmt(r.exploration_time) + "," + Fmt(m.flight_distance) + "," +
           Fmt(m.mean_velocity) + "," + Fmt(m.moving_time) + "," +
           std::to_string(m.plans) + "," + std::to_string(m.fallbacks) + "," +
           std::to_string(m.node_limit_hits) + "," +
           std::to_string(m.goal_failures) + "," + std::to_string(m.nodes) +
           "," + std::to_string(m.qp_iterations) + "," +
           (r.safety_ratio ? Fmt(*r.safety_ratio) : "-") + "," +
           (r.agents > 1 ? Fmt(r.min_pair_distance) : "-") + "," +
           Fmt(r.min_obstacle_clearance) + "," +
           std::to_string(r.total_voxels) + "," +
           std::to_string(r.unknown_voxels) + "," +
           std::to_string(r.unknown_reachable) + "," +
           std::to_string(r.unknown_flagged) + "," +
           std::to_string(r.blacklisted_voxels) + "," +
           std::to_string(r.map_mismatches) + "\n";
  }
  return out;
}

std::string FormatTimingCsv(const RunResult &r) {
  std::string out =
      "seed,agents,agent_id,plans,plan_ms_mean,plan_ms_max,plan_ms_std,"
      "solve_ms_mean,solve_ms_max,solve_ms_std,overruns,overrun_rate\n";
  for (const AgentMetrics &m : r.agent_metrics) {
    const Stats p = ComputeStats(m.plan_ms);
    const Stats s = ComputeStats(m.solve_ms);
    const double rate =
        m.plans > 0 ? static_cast<double>(m.overruns) / m.plans : 0.0;
    out += std::to_string(r.seed) + "," + std::to_string(r.agents) + "," +
           std::to_string(m.id) + "," + std::to_string(m.plans) + "," +
           Fmt(p.mean) + "," + Fmt(p.max) + "," + Fmt(p.std) + "," +
           Fmt(s.mean) + "," + Fmt(s.max) + "," + Fmt(s.std) + "," +
           std::to_string(m.overruns) + "," + Fmt(rate) + "\n";
  }
  return out;
}

RunResult RunSimulation(const Config &config, uint64_t seed, int agents,
                        const std::string &out_dir) {
  ValidateConfig(config);
  if (agents < 1 || agents > 64) {
    throw Error(ErrorCode::kConfig, "agent count must be in [1, 64]");
  }
  Simulation sim(config, seed, agents);

  namespace fs = std::filesystem;
  std::FILE *log = nullptr;
  if (!out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error(ErrorCode::kIo, "cannot create " + out_dir);
    SaveWorldFile(sim.world().cylinders,
                  (fs::path(out_dir) / "world.txt").string());
    if (config.log_trajectory) {
      const std::string path = (fs::path(out_dir) / "trajectory.csv").string();
      log = std::fopen(path.c_str(), "w");
      if (log == nullptr) throw Error(ErrorCode::kIo, "cannot write " + path);
      std::fputs("t,agent_id,px,py,pz,vx,vy,vz,ax,ay,az\n", log);
    }
  }
  RunResult result;
  try {
    result = sim.Run(log);
  } catch (...) {
    if (log != nullptr) std::fclose(log);
    throw;
  }
  if (log != nullptr) std::fclose(log);

  if (!out_dir.empty()) {
    const fs::path dir(out_dir);
    WriteText(dir / "metrics.csv", FormatMetricsCsv(result));
    WriteText(dir / "timing.csv", FormatTimingCsv(result));
    WriteText(dir / "clusters.txt",
              FormatClusterDump(sim.hub().global, sim.hub().clusters));
    SaveGridSnapshot(sim.hub().global, (dir / "global_map.vxgd").string());
  }
  return result;
}

}  // namespace explore
