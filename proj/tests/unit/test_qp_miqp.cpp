#include <gtest/gtest.h>

#include <random>

#include "core/miqp.hpp"
#include "core/qp_solver.hpp"
#include "verify/oracles.hpp"

namespace explore {
namespace {

TEST(Qp, BoxConstrainedMinimum) {
  // min (x-2)^2 + (y+1)^2  s.t.  x <= 1, x + y = 1
  QpProblem qp;
  qp.H = 2.0 * Eigen::MatrixXd::Identity(2, 2);
  qp.g = Eigen::Vector2d(-4, 2);
  qp.Aeq = Eigen::RowVector2d(1, 1);
  qp.beq = Eigen::VectorXd::Constant(1, 1.0);
  qp.Ain = Eigen::RowVector2d(1, 0);
  qp.bin = Eigen::VectorXd::Constant(1, 1.0);
  const QpResult r = SolveQp(qp);
  ASSERT_EQ(r.status, QpStatus::kOptimal);
  const auto ipm = oracle::InteriorPointQp(qp.H, qp.g, qp.Aeq, qp.beq, qp.Ain,
                                           qp.bin);
  ASSERT_TRUE(ipm.feasible);
  EXPECT_NEAR((r.x - ipm.x).norm(), 0.0, 1e-7);
  EXPECT_LE(KktResidual(qp, r), 1e-9);
}

TEST(Qp, InfeasibleIsReported) {
  QpProblem qp;
  qp.H = Eigen::MatrixXd::Identity(1, 1);
  qp.g = Eigen::VectorXd::Zero(1);
  qp.Aeq.resize(0, 1);
  qp.beq.resize(0);
  qp.Ain = Eigen::MatrixXd(2, 1);
  qp.Ain << 1, -1;
  qp.bin = Eigen::Vector2d(-1, -1);
  EXPECT_EQ(SolveQp(qp).status, QpStatus::kInfeasible);
}

Polyhedron Box(const Vec3 &lo, const Vec3 &hi) {
  Polyhedron p;
  for (int i = 0; i < 3; ++i) {
    p.halfspaces.push_back({Vec3::Unit(i), hi[i]});
    p.halfspaces.push_back({-Vec3::Unit(i), -lo[i]});
  }
  return p;
}

TimeAwareCorridor Plain(const std::vector<Polyhedron> &base, int steps) {
  TimeAwareCorridor tac;
  tac.base = base;
  tac.extra.assign(steps, {});
  tac.infeasible.assign(steps, false);
  return tac;
}

void ExpectConsistent(const MpcParams &params, const DiscreteState &x0,
                      const Trajectory &t, const TimeAwareCorridor &tac) {
  DiscreteState x = x0;
  for (int k = 0; k < t.steps(); ++k) {
    x = EulerStep(x, t.inputs[k], params.h, params.drag);
    EXPECT_NEAR((x.p - t.states[k + 1].p).norm(), 0.0, 1e-9);
    EXPECT_NEAR((x.v - t.states[k + 1].v).norm(), 0.0, 1e-9);
    EXPECT_NEAR((x.a - t.states[k + 1].a).norm(), 0.0, 1e-9);
  }
  EXPECT_LE(t.states.back().v.norm(), 1e-8);
  EXPECT_LE(t.states.back().a.norm(), 1e-8);
  EXPECT_LE(ConstraintViolation(params, t, tac), 1e-6);
}

TEST(Miqp, RestingOnTheReferenceCostsNothing) {
  MpcParams params;
  DiscreteState x0;
  x0.p = Vec3(1, 1, 1);
  const std::vector<DiscreteState> ref(params.N + 1, x0);
  const TimeAwareCorridor tac = Plain({Box(Vec3::Zero(), Vec3(2, 2, 2))}, params.N);
  MiqpStats stats;
  const auto s = SolveMiqp(params, x0, ref, tac, nullptr, &stats);
  ASSERT_TRUE(s);
  EXPECT_NEAR(s->objective, 0.0, 1e-9);
  for (const Vec3 &u : s->trajectory.inputs) EXPECT_LE(u.norm(), 1e-6);
  for (const DiscreteState &x : s->trajectory.states) {
    EXPECT_LE((x.p - x0.p).norm(), 1e-6);
  }
}

TEST(Miqp, EmptyFirstStepIsInfeasible) {
  MpcParams params;
  DiscreteState x0;
  x0.p = Vec3(1, 1, 1);
  const std::vector<DiscreteState> ref(params.N + 1, x0);
  TimeAwareCorridor tac = Plain({Box(Vec3::Zero(), Vec3(2, 2, 2))}, params.N);
  tac.extra[0].push_back({Vec3::UnitX(), -5.0});
  MiqpStats stats;
  EXPECT_FALSE(SolveMiqp(params, x0, ref, tac, nullptr, &stats));
}

TEST(Miqp, MatchesEnumerationOnSmallInstances) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MpcParams params;
  params.N = 3;
  params.p_hor = 2;
  params.max_nodes = 100000;
  // loose jerk limit so most random starts admit a solution
  params.j_max = Vec3::Constant(40.0);
  params.big_m = 50.0;
  int compared = 0;
  for (int t = 0; t < 25; ++t) {
    // two overlapping boxes forming an L, start in the first
    const Polyhedron a = Box(Vec3(0, 0, 0), Vec3(2.0, 0.6 + u(rng), 1));
    const Polyhedron b = Box(Vec3(1.2 + 0.5 * u(rng), 0, 0), Vec3(2.0, 3.0, 1));
    DiscreteState x0;
    x0.p = Vec3(0.2 + u(rng), 0.1 + 0.4 * u(rng), 0.5);
    x0.v = Vec3(u(rng) - 0.5, u(rng) - 0.5, 0.0);
    std::vector<DiscreteState> ref(params.N + 1);
    for (int k = 0; k <= params.N; ++k) {
      ref[k].p = x0.p + k / 3.0 * (Vec3(1.8, 2.5 * u(rng), 0.5) - x0.p);
    }
    const TimeAwareCorridor tac = Plain({a, b}, params.N);
    MiqpStats stats;
    const auto s = SolveMiqp(params, x0, ref, tac, nullptr, &stats);
    const auto e = oracle::EnumerateMiqp(params, x0, ref, tac);
    ASSERT_EQ(s.has_value(), e.has_value());
    if (!s) continue;
    ++compared;
    EXPECT_LE(std::abs(s->objective - *e), 1e-5 * std::max(1.0, std::abs(*e)));
    EXPECT_NEAR(MpcObjective(params, s->trajectory, ref), s->objective,
                1e-6 * std::max(1.0, s->objective));
    ExpectConsistent(params, x0, s->trajectory, tac);
  }
  EXPECT_GT(compared, 10);
}

TEST(Miqp, FullHorizonRespectsBounds) {
  MpcParams params;
  DiscreteState x0;
  x0.p = Vec3(0.5, 0.5, 0.5);
  std::vector<DiscreteState> ref(params.N + 1, x0);
  for (int k = 0; k <= params.N; ++k) ref[k].p.x() += 0.3 * k;
  const TimeAwareCorridor tac =
      Plain({Box(Vec3::Zero(), Vec3(2, 1, 1)), Box(Vec3(1.5, 0, 0), Vec3(2.5, 4, 1))},
            params.N);
  MiqpStats stats;
  const auto s = SolveMiqp(params, x0, ref, tac, nullptr, &stats);
  ASSERT_TRUE(s);
  ExpectConsistent(params, x0, s->trajectory, tac);
  for (int k = 0; k < s->trajectory.steps(); ++k) {
    EXPECT_LE(s->trajectory.inputs[k].cwiseAbs().maxCoeff(), 8.0 + 1e-9);
  }
  EXPECT_LE(s->kkt_residual, 1e-6);
}

}  // namespace
}  // namespace explore
