#include "verify/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "core/corridor.hpp"
#include "core/distance_field.hpp"
#include "core/dynamics.hpp"
#include "core/frontier.hpp"
#include "core/mapping.hpp"
#include "core/miqp.hpp"
#include "core/path_search.hpp"
#include "core/qp_solver.hpp"
#include "harness/config.hpp"
#include "sim/simulator.hpp"
#include "verify/oracles.hpp"

namespace explore {

namespace {

using Rng = std::mt19937_64;

double Uniform(Rng &rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

int UniformInt(Rng &rng, int n) { return static_cast<int>(rng() % n); }

std::string Format(const char *fmt, double a = 0, double b = 0,
                   double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       since)
      .count();
}

VoxelGrid RandomOccupancy(Rng &rng, const Index3 &dims, double occupied) {
  VoxelGrid g(Index3::Zero(), dims, 0.3);
  for (int64_t i = 0; i < g.size(); ++i) {
    g.Set(i, Uniform(rng, 0, 1) < occupied ? VoxelState::kOccupied
                                           : VoxelState::kFree);
  }
  return g;
}

// unknown, free and occupied with the given odds of unknown / occupied
VoxelGrid RandomThreeState(Rng &rng, const Index3 &dims, double unknown,
                           double occupied) {
  VoxelGrid g(Index3::Zero(), dims, 0.3);
  for (int64_t i = 0; i < g.size(); ++i) {
    const double u = Uniform(rng, 0, 1);
    g.Set(i, u < unknown              ? VoxelState::kUnknown
             : u < unknown + occupied ? VoxelState::kOccupied
                                      : VoxelState::kFree);
  }
  return g;
}

std::vector<uint8_t> FreeMask(const VoxelGrid &g) {
  std::vector<uint8_t> m(g.size());
  for (int64_t i = 0; i < g.size(); ++i) m[i] = g.Get(i) == VoxelState::kFree;
  return m;
}

Index3 RandomIndex(Rng &rng, const Index3 &dims) {
  return Index3(UniformInt(rng, dims.x()), UniformInt(rng, dims.y()),
                UniformInt(rng, dims.z()));
}

Polyhedron Box(const Vec3 &center, const Vec3 &half) {
  Polyhedron poly;
  for (int a = 0; a < 3; ++a) {
    poly.halfspaces.push_back({Vec3::Unit(a), center[a] + half[a]});
    poly.halfspaces.push_back({-Vec3::Unit(a), -(center[a] - half[a])});
  }
  return poly;
}

// random N=3, two-box instance, every other one with a moving neighbor
struct MiqpInstance {
  MpcParams params;
  DiscreteState x0;
  std::vector<DiscreteState> reference;
  TimeAwareCorridor tac;
};

MiqpInstance RandomMiqp(Rng &rng, int index) {
  MiqpInstance in;
  in.params.N = 3;
  in.params.p_hor = 2;
  in.params.big_m = 50.0;
  in.params.j_max = Vec3::Constant(40.0);
  auto vec = [&](double s) -> Vec3 {
    return Vec3(Uniform(rng, -1, 1), Uniform(rng, -1, 1), Uniform(rng, -1, 1)) *
           s;
  };
  in.x0.p = vec(0.2);
  in.x0.v = vec(0.2);
  in.x0.a = vec(0.5);
  std::vector<Polyhedron> base;
  for (int p = 0; p < 2; ++p) {
    const Vec3 c = p == 0 ? Vec3(Vec3::Zero()) : vec(1.5);
    const Vec3 half = Vec3(0.4 + 0.6 * std::abs(Uniform(rng, -1, 1)),
                           0.4 + 0.6 * std::abs(Uniform(rng, -1, 1)),
                           0.4 + 0.6 * std::abs(Uniform(rng, -1, 1)));
    base.push_back(Box(c, half));
  }
  std::vector<Vec3> own(in.params.N + 1, in.x0.p);
  std::vector<NeighborPrediction> others;
  if (index % 2 == 1) {
    NeighborPrediction o;
    for (int k = 0; k <= in.params.N; ++k) o.positions.push_back(vec(2.0));
    o.d_rad = 0.3;
    others.push_back(o);
  }
  in.tac = AssembleTimeAware(base, own, others, 100.0);
  in.reference.resize(in.params.N + 1);
  for (DiscreteState &r : in.reference) r.p = vec(2.0);
  return in;
}

CheckResult CheckJps(Rng &rng) {
  int mismatches = 0, paths = 0;
  for (int t = 0; t < 100; ++t) {
    VoxelGrid g = RandomOccupancy(rng, Index3(20, 20, 20), 0.1);
    const Index3 s = RandomIndex(rng, g.dims());
    const Index3 e = RandomIndex(rng, g.dims());
    g.Set(s, VoxelState::kFree);
    g.Set(e, VoxelState::kFree);
    const auto fast = JpsSearch(g, s, e);
    const auto slow = oracle::DijkstraSteps(g, FreeMask(g), s, e);
    if (fast.has_value() != slow.has_value() ||
        (fast && !(fast->steps == *slow))) {
      ++mismatches;
    }
    paths += fast.has_value();
  }
  return {"jps_length_equals_dijkstra", mismatches == 0,
          Format("100 grids 20^3 at 10%% occupancy, %.0f with a path, %.0f "
                 "mismatches (exact step counts)",
                 paths, mismatches)};
}

CheckResult CheckDmp(Rng &rng) {
  int mismatches = 0, compared = 0;
  double worst = 0.0;
  const double push = 0.9, weight = 2.0;
  for (int t = 0; t < 100; ++t) {
    VoxelGrid g = RandomOccupancy(rng, Index3(20, 20, 20), 0.1);
    const Index3 s = RandomIndex(rng, g.dims());
    const Index3 e = RandomIndex(rng, g.dims());
    g.Set(s, VoxelState::kFree);
    g.Set(e, VoxelState::kFree);
    const std::vector<uint8_t> mask = FreeMask(g);
    const auto jps = JpsSearch(g, mask, s, e);
    if (!jps) continue;
    const DistanceField field = ComputeDistanceField(g);
    const GridPath refined = DmpPush(g, mask, field, *jps, push, weight);
    const double fast = PenalizedCost(g, field, refined.voxels, push, weight);
    const auto slow =
        oracle::PenalizedDijkstra(g, mask, field, s, e, push, weight);
    ++compared;
    const double rel =
        slow ? std::abs(fast - *slow) / std::max(1.0, std::abs(*slow)) : 1.0;
    worst = std::max(worst, rel);
    if (rel > 1e-9) ++mismatches;
  }
  return {"dmp_cost_equals_penalized_dijkstra", mismatches == 0,
          Format("%.0f paths, %.0f mismatches, worst relative gap %.3g",
                 compared, mismatches, worst)};
}

CheckResult CheckDistanceField(Rng &rng) {
  double worst = 0.0;
  for (int t = 0; t < 30; ++t) {
    const VoxelGrid g = RandomThreeState(rng, Index3(12, 10, 8), 0.05, 0.05);
    const DistanceField fast = ComputeDistanceField(g);
    const std::vector<double> slow = oracle::BruteDistanceField(g);
    for (int64_t i = 0; i < g.size(); ++i) {
      if (std::isinf(slow[i]) != std::isinf(fast.At(i))) {
        worst = std::numeric_limits<double>::infinity();
      } else if (!std::isinf(slow[i])) {
        worst = std::max(worst, std::abs(slow[i] - fast.At(i)));
      }
    }
  }
  return {"distance_field_equals_brute_force", worst <= 1e-9,
          Format("30 grids, max abs error %.3g m", worst)};
}

CheckResult CheckFrontier(Rng &rng) {
  int border_bad = 0, cluster_bad = 0, goal_bad = 0, clusters = 0;
  for (int t = 0; t < 100; ++t) {
    const double unknown = 0.05 + 0.5 * Uniform(rng, 0, 1);
    const VoxelGrid g = RandomThreeState(rng, Index3(12, 12, 12), unknown, 0.1);
    const std::vector<int64_t> borders = FindBorderVoxels(g);
    if (borders != oracle::BorderVoxels(g)) ++border_bad;
    const std::vector<Cluster> fast = ClusterBorders(g, borders);
    const auto slow = oracle::BorderComponents(g, borders);
    if (fast.size() != slow.size()) {
      ++cluster_bad;
      continue;
    }
    for (size_t c = 0; c < fast.size(); ++c) {
      ++clusters;
      if (fast[c].members != slow[c]) ++cluster_bad;
      if (fast[c].potential_goal != oracle::ClosestToCentroid(g, slow[c])) {
        ++goal_bad;
      }
    }
  }
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "100 grids 12^3, %d clusters; border mismatches %d, cluster "
                "mismatches %d, potential goal mismatches %d",
                clusters, border_bad, cluster_bad, goal_bad);
  return {"frontier_equals_brute_force",
          border_bad == 0 && cluster_bad == 0 && goal_bad == 0, buf};
}

CheckResult CheckQp(Rng &rng) {
  int mismatches = 0, feasible = 0;
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int n = 6, me = 2, mi = 10;
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j <= i; ++j) L(i, j) = Uniform(rng, -1, 1);
      L(i, i) = 0.5 + std::abs(L(i, i));
    }
    QpProblem qp;
    qp.H = L * L.transpose();
    qp.g = Eigen::VectorXd::NullaryExpr(n, [&] { return Uniform(rng, -2, 2); });
    qp.Aeq = Eigen::MatrixXd::NullaryExpr(me, n,
                                          [&] { return Uniform(rng, -1, 1); });
    qp.beq = Eigen::VectorXd::NullaryExpr(me, [&] { return Uniform(rng, -1, 1); });
    qp.Ain = Eigen::MatrixXd::NullaryExpr(mi, n,
                                          [&] { return Uniform(rng, -1, 1); });
    qp.bin = Eigen::VectorXd::NullaryExpr(
        mi, [&] { return Uniform(rng, t % 4 == 0 ? -2.0 : -0.2, 1.0); });
    const QpResult fast = SolveQp(qp);
    const oracle::IpmResult slow =
        oracle::InteriorPointQp(qp.H, qp.g, qp.Aeq, qp.beq, qp.Ain, qp.bin);
    const bool fast_ok = fast.status == QpStatus::kOptimal;
    if (fast_ok != slow.feasible) {
      ++mismatches;
      continue;
    }
    if (!fast_ok) continue;
    ++feasible;
    const double rel = std::abs(fast.objective - slow.objective) /
                       std::max(1.0, std::abs(slow.objective));
    worst = std::max(worst, rel);
    if (rel > 1e-6) ++mismatches;
  }
  return {"qp_equals_interior_point", mismatches == 0,
          Format("100 problems, %.0f feasible, %.0f mismatches, worst "
                 "relative gap %.3g",
                 feasible, mismatches, worst)};
}

std::vector<CheckResult> CheckMiqpAndReplay(Rng &rng) {
  int mismatches = 0, feasible = 0;
  double worst = 0.0, worst_replay = 0.0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int t = 0; t < 200; ++t) {
    const MiqpInstance in = RandomMiqp(rng, t);
    MiqpStats stats;
    const auto fast =
        SolveMiqp(in.params, in.x0, in.reference, in.tac, nullptr, &stats);
    const auto slow =
        oracle::EnumerateMiqp(in.params, in.x0, in.reference, in.tac);
    if (fast.has_value() != slow.has_value()) {
      ++mismatches;
      continue;
    }
    if (!fast) continue;
    ++feasible;
    const double rel =
        std::abs(fast->objective - *slow) / std::max(1.0, std::abs(*slow));
    worst = std::max(worst, rel);
    if (rel > 1e-5) ++mismatches;
    const Trajectory &traj = fast->trajectory;
    for (int k = 0; k < traj.steps(); ++k) {
      const DiscreteState next = EulerStep(traj.states[k], traj.inputs[k],
                                           in.params.h, in.params.drag);
      const DiscreteState &got = traj.states[k + 1];
      worst_replay = std::max({worst_replay, (next.p - got.p).cwiseAbs().maxCoeff(),
                               (next.v - got.v).cwiseAbs().maxCoeff(),
                               (next.a - got.a).cwiseAbs().maxCoeff()});
    }
  }
  const double secs = Seconds(t0);
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "200 instances N=3 P=2, %d feasible, %d mismatches, worst "
                "relative gap %.3g, %.2f s",
                feasible, mismatches, worst, secs);
  std::vector<CheckResult> out;
  out.push_back({"miqp_equals_enumeration", mismatches == 0 && secs < 60.0, buf});
  out.push_back({"solver_trajectories_replay_through_euler",
                 worst_replay <= 1e-9,
                 Format("%.0f trajectories, max deviation %.3g", feasible,
                        worst_replay)});
  return out;
}

CheckResult CheckEulerExamples() {
  double err = 0.0;
  // at rest with zero input stays put
  {
    DiscreteState x;
    x.p = Vec3(1.0, -2.0, 0.5);
    const DiscreteState y = EulerStep(x, Vec3::Zero(), 0.1, Vec3::Ones());
    err = std::max({err, (y.p - x.p).norm(), y.v.norm(), y.a.norm()});
  }
  // unit velocity under unit drag
  {
    DiscreteState x;
    x.v = Vec3(1.0, 0.0, 0.0);
    const DiscreteState y = EulerStep(x, Vec3::Zero(), 0.1, Vec3::Ones());
    err = std::max({err, (y.p - Vec3(0.1, 0.0, 0.0)).norm(),
                    (y.v - Vec3(0.9, 0.0, 0.0)).norm(), y.a.norm()});
  }
  // drag-free constant jerk integrates the acceleration exactly
  {
    DiscreteState x;
    for (int k = 0; k < 10; ++k) {
      x = EulerStep(x, Vec3(1.0, 0.0, 0.0), 0.1, Vec3::Zero());
    }
    err = std::max(err, (x.a - Vec3(1.0, 0.0, 0.0)).norm());
  }
  return {"euler_step_hand_examples", err <= 1e-12,
          Format("max error %.3g", err)};
}

// ---- invariants

CheckResult CheckGridBijection(Rng &rng) {
  int bad = 0;
  for (int t = 0; t < 20; ++t) {
    const Index3 origin(UniformInt(rng, 21) - 10, UniformInt(rng, 21) - 10,
                        UniformInt(rng, 5) - 2);
    const Index3 dims(1 + UniformInt(rng, 9), 1 + UniformInt(rng, 9),
                      1 + UniformInt(rng, 5));
    const VoxelGrid g(origin, dims, 0.3);
    for (int64_t i = 0; i < g.size(); ++i) {
      const Index3 idx = g.Unlinear(i);
      if (g.Linear(idx) != i || g.PointToIndex(g.Center(idx)) != idx) ++bad;
    }
  }
  return {"grid_index_coordinate_bijection", bad == 0,
          Format("%.0f failures", bad)};
}

CheckResult CheckScanMonotone(Rng &rng) {
  int reverted = 0;
  VoxelGrid g(Index3::Zero(), Index3(20, 20, 6), 0.3);
  for (int t = 0; t < 30; ++t) {
    const std::vector<VoxelState> before(g.states().begin(), g.states().end());
    PointCloud cloud;
    cloud.sensor_origin =
        Vec3(Uniform(rng, 0.1, 5.9), Uniform(rng, 0.1, 5.9), Uniform(rng, 0.1, 1.7));
    for (int k = 0; k < 40; ++k) {
      const Vec3 p(Uniform(rng, 0.0, 5.99), Uniform(rng, 0.0, 5.99),
                   Uniform(rng, 0.0, 1.79));
      (k % 3 == 0 ? cloud.max_range_points : cloud.points).push_back(p);
    }
    IntegrateScan(g, cloud, {}, 0.6);
    for (int64_t i = 0; i < g.size(); ++i) {
      if (before[i] != VoxelState::kUnknown && g.Get(i) == VoxelState::kUnknown) {
        ++reverted;
      }
    }
  }
  return {"scan_never_reverts_to_unknown", reverted == 0,
          Format("%.0f voxels reverted over 30 scans", reverted)};
}

CheckResult CheckMergeRules(Rng &rng) {
  int bad = 0;
  for (int t = 0; t < 20; ++t) {
    const VoxelGrid global0 = RandomThreeState(rng, Index3(12, 12, 4), 0.4, 0.2);
    VoxelGrid local = RandomThreeState(rng, Index3(6, 6, 4), 0.4, 0.2);
    local = VoxelGrid(Index3(UniformInt(rng, 9) - 1, UniformInt(rng, 9) - 1, 0),
                      local.dims(), 0.3);
    for (int64_t i = 0; i < local.size(); ++i) {
      const double u = Uniform(rng, 0, 1);
      local.Set(i, u < 0.4   ? VoxelState::kUnknown
                   : u < 0.6 ? VoxelState::kOccupied
                             : VoxelState::kFree);
    }
    for (bool static_env : {false, true}) {
      VoxelGrid global = global0;
      MergeLocalIntoGlobal(global, local, static_env);
      for (int64_t i = 0; i < global.size(); ++i) {
        const Index3 gi = global.Unlinear(i);
        const Index3 li = gi + global.origin_index() - local.origin_index();
        const VoxelState was = global0.Get(i);
        VoxelState want = was;
        if (local.Contains(li) && local.Get(li) != VoxelState::kUnknown &&
            !(static_env && was == VoxelState::kOccupied)) {
          want = local.Get(li);
        }
        if (global.Get(i) != want) ++bad;
      }
    }
  }
  return {"merge_follows_update_rules", bad == 0,
          Format("%.0f voxels differ from the rule", bad)};
}

CheckResult CheckRecenter(Rng &rng) {
  int bad = 0;
  VoxelGrid g = RandomThreeState(rng, Index3(9, 9, 5), 0.3, 0.2);
  g = Recenter(g, g.Center(Index3(4, 4, 2)));
  for (int t = 0; t < 20; ++t) {
    const Vec3 p = g.Center(Index3(4, 4, 2)) +
                   Vec3(Uniform(rng, -1, 1), Uniform(rng, -1, 1), Uniform(rng, -0.5, 0.5));
    const VoxelGrid next = Recenter(g, p);
    if (next.PointToIndex(p) != Index3(4, 4, 2)) ++bad;
    for (int64_t i = 0; i < next.size(); ++i) {
      const Index3 li = next.Unlinear(i) + next.origin_index() - g.origin_index();
      const VoxelState want = g.Contains(li) ? g.Get(li) : VoxelState::kUnknown;
      if (next.Get(i) != want) ++bad;
    }
    g = next;
  }
  return {"recenter_keeps_overlap", bad == 0,
          Format("%.0f failures", bad)};
}

CheckResult CheckClusterPartition(Rng &rng) {
  int bad = 0;
  for (int t = 0; t < 30; ++t) {
    const VoxelGrid g = RandomThreeState(rng, Index3(10, 10, 10), 0.2, 0.1);
    const std::vector<int64_t> borders = FindBorderVoxels(g);
    std::vector<int64_t> all;
    for (const Cluster &c : ClusterBorders(g, borders)) {
      if (c.members.empty() ||
          !std::binary_search(c.members.begin(), c.members.end(),
                              c.potential_goal)) {
        ++bad;
      }
      all.insert(all.end(), c.members.begin(), c.members.end());
    }
    std::sort(all.begin(), all.end());
    if (all != borders) ++bad;
  }
  return {"clusters_partition_border_set", bad == 0,
          Format("%.0f failures", bad)};
}

CheckResult CheckAssignment(Rng &rng) {
  int bad = 0;
  for (int t = 0; t < 50; ++t) {
    std::vector<Vec3> agents, goals;
    for (int i = 0; i < 1 + UniformInt(rng, 5); ++i) {
      agents.emplace_back(Uniform(rng, 0, 10), Uniform(rng, 0, 10), 1.0);
    }
    for (int i = 0; i < UniformInt(rng, 7); ++i) {
      goals.emplace_back(Uniform(rng, 0, 10), Uniform(rng, 0, 10), 1.0);
    }
    const GoalAssignment a = AssignGoals(agents, goals, 1);
    const GoalAssignment b = AssignGoals(agents, goals, 1);
    std::vector<size_t> used;
    for (size_t i = 0; i < agents.size(); ++i) {
      if (a.goal_index[i] != b.goal_index[i]) ++bad;
      if (!a.goal_index[i]) continue;
      if (std::find(used.begin(), used.end(), *a.goal_index[i]) != used.end()) {
        ++bad;
      }
      used.push_back(*a.goal_index[i]);
    }
    if (used.size() != std::min(agents.size(), goals.size())) ++bad;
  }
  return {"assignment_distinct_and_deterministic", bad == 0,
          Format("%.0f failures", bad)};
}

CheckResult CheckLipschitz(Rng &rng) {
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const VoxelGrid g = RandomThreeState(rng, Index3(14, 14, 6), 0.05, 0.05);
    const DistanceField f = ComputeDistanceField(g);
    for (int64_t i = 0; i < g.size(); ++i) {
      if (g.Get(i) != VoxelState::kFree && f.At(i) != 0.0) worst = 1e9;
      const Index3 c = g.Unlinear(i);
      for (const Index3 &o : NeighborOffsets26()) {
        const Index3 n = c + o;
        if (!g.Contains(n)) continue;
        const double step = (g.Center(n) - g.Center(c)).norm();
        worst = std::max(worst,
                         std::abs(f.At(g.Linear(n)) - f.At(i)) - step);
      }
    }
  }
  return {"distance_field_lipschitz", worst <= 1e-9,
          Format("largest excess over the step length %.3g m", worst)};
}

CheckResult CheckSeparation(Rng &rng) {
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const Vec3 a(Uniform(rng, -3, 3), Uniform(rng, -3, 3), Uniform(rng, -3, 3));
    const Vec3 b(Uniform(rng, -3, 3), Uniform(rng, -3, 3), Uniform(rng, -3, 3));
    const double d = Uniform(rng, 0.0, 0.5);
    const Halfspace ha = SeparatingHyperplane(a, b, d);
    const Halfspace hb = SeparatingHyperplane(b, a, d);
    // any point pair satisfying both planes is at least 2 d apart along n
    const double gap = -(ha.offset + hb.offset);
    worst = std::max({worst, std::abs(gap - 2.0 * d),
                      std::abs(ha.normal.norm() - 1.0),
                      (ha.normal + hb.normal).norm()});
  }
  return {"separating_planes_leave_a_2d_slab", worst <= 1e-12,
          Format("max deviation %.3g", worst)};
}

// corridors over paths of the traversable set, as the planner builds them
CheckResult CheckCorridor(Rng &rng) {
  int bad_points = 0, disjoint = 0, no_waypoint = 0, pairs = 0, empty = 0;
  int corridors = 0;
  const double d_rad = 0.3;
  for (int t = 0; t < 60; ++t) {
    VoxelGrid g = RandomOccupancy(rng, Index3(20, 20, 8), 0.03);
    const std::vector<uint8_t> trav =
        ComputeTraversable(g, InflationVoxels(d_rad, g.voxel_size()));
    std::vector<int64_t> cells;
    for (int64_t i = 0; i < g.size(); ++i) {
      if (trav[i]) cells.push_back(i);
    }
    if (cells.size() < 2) continue;
    const Index3 s = g.Unlinear(cells[rng() % cells.size()]);
    const Index3 e = g.Unlinear(cells[rng() % cells.size()]);
    const auto path = JpsSearch(g, trav, s, e);
    if (!path) continue;
    const std::vector<Polyhedron> polys = BuildCorridor(g, *path, 3, d_rad);
    ++corridors;
    for (const Polyhedron &poly : polys) {
      bool has_center = false;
      for (int64_t i = 0; i < g.size() && !has_center; ++i) {
        has_center = poly.Contains(g.Center(i));
      }
      if (!has_center) ++empty;
      int inside = 0;
      for (int k = 0; k < 20000 && inside < 1000; ++k) {
        const Vec3 q(Uniform(rng, 0, 6), Uniform(rng, 0, 6),
                     Uniform(rng, 0, 2.4));
        if (!poly.Contains(q)) continue;
        ++inside;
        if (g.GetOr(g.PointToIndex(q)) != VoxelState::kFree) ++bad_points;
      }
    }
    for (size_t p = 1; p < polys.size(); ++p) {
      bool shared = false;
      for (const Vec3 &w : path->waypoints) {
        shared |= polys[p - 1].Contains(w) && polys[p].Contains(w);
      }
      ++pairs;
      if (shared) continue;
      // a diagonal step around an obstacle corner leaves no free box that
      // holds both waypoints with d_rad margin; the pair must still meet
      ++no_waypoint;
      std::vector<Halfspace> both = polys[p - 1].halfspaces;
      both.insert(both.end(), polys[p].halfspaces.begin(),
                  polys[p].halfspaces.end());
      if (IsEmpty(both)) ++disjoint;
    }
  }
  char buf[240];
  std::snprintf(buf, sizeof(buf),
                "%d corridors; %d sampled points outside free voxels, %d "
                "polyhedra without a voxel center, %d of %d consecutive pairs "
                "disjoint (%d meet away from a waypoint)",
                corridors, bad_points, empty, disjoint, pairs, no_waypoint);
  return {"corridor_free_and_overlapping",
          bad_points == 0 && empty == 0 && disjoint == 0, buf};
}

CheckResult CheckFallback() {
  Trajectory t;
  t.start_ms = 0;
  t.step_ms = 100;
  DiscreteState x;
  x.v = Vec3(1.0, 0.5, 0.0);
  MpcParams params;
  t.states.push_back(x);
  for (int k = 0; k < params.N; ++k) {
    const Vec3 u = k < 4 ? Vec3(-2.0, -1.0, 0.0) : Vec3::Zero();
    t.inputs.push_back(u);
    t.states.push_back(EulerStep(t.states.back(), u, 0.1, params.drag));
  }
  for (int i = 0; i < params.N + 2; ++i) t = FallbackBrake(t);
  double spread = 0.0;
  for (const DiscreteState &s : t.states) {
    spread = std::max({spread, (s.p - t.states.front().p).norm(), s.v.norm(),
                       s.a.norm()});
  }
  return {"fallback_converges_to_hover", spread == 0.0,
          Format("after N+2 brakes the states differ by %.3g", spread)};
}

CheckResult CheckConfigRoundTrip(Rng &rng) {
  Config c;
  c.world.density = Uniform(rng, 0.0, 0.2);
  c.planner.mpc.r_u = Vec3(Uniform(rng, 0, 1), 1.0 / 3.0, 1e-17);
  c.seeds = {7, 11};
  c.agent_counts = {2, 3};
  c.output_dir = "somewhere";
  const std::string once = SerializeConfig(c);
  const std::string twice = SerializeConfig(ParseConfig(once));
  const Config back = ParseConfig(once);
  const bool same = once == twice && back.world.density == c.world.density &&
                    back.planner.mpc.r_u == c.planner.mpc.r_u;
  return {"config_round_trip", same,
          same ? "parse(serialize(c)) serializes identically"
               : "serialized text changed"};
}

Config SmallWorld(double size, double density) {
  Config c;
  c.world.size = Vec3(size, size, 3.0);
  c.world.density = density;
  c.log_trajectory = false;
  c.max_sim_time_s = 300.0;
  c.agent_counts = {1, 2};
  return c;
}

std::vector<CheckResult> CheckSimulations() {
  std::vector<CheckResult> out;
  {
    const RunResult r = RunSimulation(SmallWorld(6.0, 0.0), 1, 1, "");
    const bool ok = r.status == RunStatus::kComplete && !r.safety_ratio &&
                    r.unknown_reachable == 0 && r.exploration_time > 0.0 &&
                    r.map_mismatches == 0;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "%s after %.1f s, %lld unknown voxels left, %lld reachable",
                  RunStatusName(r.status), r.exploration_time,
                  static_cast<long long>(r.unknown_voxels),
                  static_cast<long long>(r.unknown_reachable));
    out.push_back({"sim_empty_world_completes", ok, buf});
  }
  for (int delay : {0, 20}) {
    Config c = SmallWorld(9.0, 0.1);
    c.bus_delay_ms = delay;
    const RunResult a = RunSimulation(c, 3, 2, "");
    const RunResult b = RunSimulation(c, 3, 2, "");
    const bool same = FormatMetricsCsv(a) == FormatMetricsCsv(b);
    const bool ok = a.status == RunStatus::kComplete && a.safety_ratio &&
                    *a.safety_ratio >= 1.0 && a.map_mismatches == 0 &&
                    a.unknown_increases == 0 && a.unknown_reachable == 0 &&
                    same;
    char buf[300];
    std::snprintf(buf, sizeof(buf),
                  "bus delay %d ms: %s after %.1f s, safety ratio %.3f, map "
                  "mismatches %lld, unknown increases %d, reruns %s",
                  delay, RunStatusName(a.status), a.exploration_time,
                  a.safety_ratio.value_or(0.0),
                  static_cast<long long>(a.map_mismatches),
                  a.unknown_increases, same ? "identical" : "differ");
    out.push_back({"sim_two_agents_delay_" + std::to_string(delay), ok, buf});
  }
  return out;
}

}  // namespace

std::vector<CheckResult> RunOracleSuite(uint64_t seed) {
  Rng rng(seed);
  std::vector<CheckResult> out;
  out.push_back(CheckJps(rng));
  out.push_back(CheckDmp(rng));
  out.push_back(CheckDistanceField(rng));
  out.push_back(CheckFrontier(rng));
  out.push_back(CheckQp(rng));
  for (CheckResult &r : CheckMiqpAndReplay(rng)) out.push_back(std::move(r));
  out.push_back(CheckEulerExamples());
  return out;
}

std::vector<CheckResult> RunInvariantSuite(uint64_t seed) {
  Rng rng(seed);
  std::vector<CheckResult> out;
  out.push_back(CheckGridBijection(rng));
  out.push_back(CheckScanMonotone(rng));
  out.push_back(CheckMergeRules(rng));
  out.push_back(CheckRecenter(rng));
  out.push_back(CheckClusterPartition(rng));
  out.push_back(CheckAssignment(rng));
  out.push_back(CheckLipschitz(rng));
  out.push_back(CheckSeparation(rng));
  out.push_back(CheckCorridor(rng));
  out.push_back(CheckFallback());
  out.push_back(CheckConfigRoundTrip(rng));
  for (CheckResult &r : CheckSimulations()) out.push_back(std::move(r));
  return out;
}

}  // namespace explore
