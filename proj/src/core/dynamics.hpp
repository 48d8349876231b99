#pragma once

#include <cstdint>
#include <vector>

#include "core/common.hpp"

namespace explore {

struct DiscreteState {
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 a = Vec3::Zero();
};

// Euler step of p' = v, v' = a - D v, a' = u with diagonal D
DiscreteState EulerStep(const DiscreteState &x, const Vec3 &u, double h,
                        const Vec3 &drag);

// N-step plan on the shared clock. Point k is reached at
// start_ms + k * step_ms; in between, states are interpolated linearly.
struct Trajectory {
  int64_t start_ms = 0;
  int64_t step_ms = 100;
  std::vector<DiscreteState> states;          // x_0 .. x_N
  std::vector<Vec3> inputs;                   // u_0 .. u_{N-1}
  std::vector<std::vector<uint8_t>> binaries; // [k][p]

  int steps() const { return static_cast<int>(inputs.size()); }
  int64_t end_ms() const {
    return start_ms + step_ms * (static_cast<int64_t>(states.size()) - 1);
  }
  // clamped to the first/last state outside the covered interval
  DiscreteState Evaluate(int64_t t_ms) const;
  // position of point floor((t - start)/step), clamped to [0, N]
  const DiscreteState &PointAt(int64_t t_ms) const;
};

// trajectory that holds x (at rest) for n steps
Trajectory HoverTrajectory(const Vec3 &p, int64_t start_ms, int64_t step_ms,
                           int n);

// prev shifted by one step with a hover state appended
Trajectory FallbackBrake(const Trajectory &prev);

}  // namespace explore
