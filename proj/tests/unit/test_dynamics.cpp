#include <gtest/gtest.h>

#include "core/dynamics.hpp"

namespace explore {
namespace {

TEST(EulerStep, RestIsAFixedPoint) {
  DiscreteState x;
  x.p = Vec3(1, 2, 3);
  const DiscreteState y = EulerStep(x, Vec3::Zero(), 0.1, Vec3::Ones());
  EXPECT_EQ(y.p, x.p);
  EXPECT_EQ(y.v, Vec3::Zero());
  EXPECT_EQ(y.a, Vec3::Zero());
}

TEST(EulerStep, DragSlowsDown) {
  DiscreteState x;
  x.v = Vec3(1, 0, 0);
  const DiscreteState y = EulerStep(x, Vec3::Zero(), 0.1, Vec3::Ones());
  EXPECT_NEAR((y.p - Vec3(0.1, 0, 0)).norm(), 0.0, 1e-12);
  EXPECT_NEAR((y.v - Vec3(0.9, 0, 0)).norm(), 0.0, 1e-12);
  EXPECT_EQ(y.a, Vec3::Zero());
}

TEST(EulerStep, ConstantJerkIntegratesExactly) {
  DiscreteState x;
  for (int k = 0; k < 10; ++k) x = EulerStep(x, Vec3(1, 0, 0), 0.1, Vec3::Zero());
  EXPECT_NEAR((x.a - Vec3(1, 0, 0)).norm(), 0.0, 1e-12);
}

Trajectory Moving() {
  Trajectory t;
  t.start_ms = 1000;
  t.step_ms = 100;
  DiscreteState x;
  x.v = Vec3(1, 0, 0);
  t.states.push_back(x);
  for (int k = 0; k < 4; ++k) {
    t.inputs.push_back(Vec3(0, 0, k == 0 ? 1.0 : -0.5));
    t.binaries.push_back({1, 0});
    t.states.push_back(EulerStep(t.states.back(), t.inputs.back(), 0.1,
                                 Vec3::Ones()));
  }
  return t;
}

TEST(Trajectory, EvaluateInterpolatesAndClamps) {
  const Trajectory t = Moving();
  EXPECT_EQ(t.end_ms(), 1400);
  EXPECT_EQ(t.Evaluate(900).p, t.states[0].p);
  EXPECT_EQ(t.Evaluate(5000).p, t.states.back().p);
  const Vec3 mid = 0.5 * (t.states[1].p + t.states[2].p);
  EXPECT_NEAR((t.Evaluate(1150).p - mid).norm(), 0.0, 1e-15);
  EXPECT_EQ(&t.PointAt(1290), &t.states[2]);
}

TEST(FallbackBrake, ShiftsByOneStep) {
  const Trajectory t = Moving();
  const Trajectory f = FallbackBrake(t);
  EXPECT_EQ(f.start_ms, t.start_ms + t.step_ms);
  ASSERT_EQ(f.states.size(), t.states.size());
  for (size_t k = 0; k + 1 < t.states.size(); ++k) {
    EXPECT_EQ(f.states[k].p, t.states[k + 1].p);
  }
  EXPECT_EQ(f.states.back().p, t.states.back().p);
  EXPECT_EQ(f.states.back().v, Vec3::Zero());
}

TEST(FallbackBrake, RestingPlanStaysPut) {
  const Trajectory h = HoverTrajectory(Vec3(1, 2, 3), 0, 100, 5);
  const Trajectory f = FallbackBrake(h);
  EXPECT_EQ(f.states.back().p, Vec3(1, 2, 3));
  EXPECT_EQ(f.states.back().v, Vec3::Zero());
}

TEST(FallbackBrake, RepeatedBrakingEndsInHover) {
  Trajectory t = Moving();
  for (int i = 0; i < 6; ++i) t = FallbackBrake(t);
  for (const DiscreteState &s : t.states) {
    EXPECT_EQ(s.p, t.states.front().p);
    EXPECT_EQ(s.v, Vec3::Zero());
    EXPECT_EQ(s.a, Vec3::Zero());
  }
}

}  // namespace
}  // namespace explore
