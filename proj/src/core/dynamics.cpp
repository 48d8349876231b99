#include "core/dynamics.hpp"

#include <algorithm>

namespace explore {

DiscreteState EulerStep(const DiscreteState &x, const Vec3 &u, double h,
                        const Vec3 &drag) {
  DiscreteState out;
  out.p = x.p + h * x.v;
  out.v = x.v + h * (x.a - drag.cwiseProduct(x.v));
  out.a = x.a + h * u;
  return out;
}

DiscreteState Trajectory::Evaluate(int64_t t_ms) const {
  if (states.empty()) return {};
  if (t_ms <= start_ms) return states.front();
  const int64_t rel = t_ms - start_ms;
  const int64_t k = rel / step_ms;
  if (k >= static_cast<int64_t>(states.size()) - 1) return states.back();
  const double s = static_cast<double>(rel - k * step_ms) / step_ms;
  const DiscreteState &a = states[k];
  const DiscreteState &b = states[k + 1];
  DiscreteState out;
  out.p = a.p + s * (b.p - a.p);
  out.v = a.v + s * (b.v - a.v);
  out.a = a.a + s * (b.a - a.a);
  return out;
}

const DiscreteState &Trajectory::PointAt(int64_t t_ms) const {
  int64_t k = t_ms <= start_ms ? 0 : (t_ms - start_ms) / step_ms;
  k = std::min<int64_t>(k, static_cast<int64_t>(states.size()) - 1);
  return states[k];
}

Trajectory HoverTrajectory(const Vec3 &p, int64_t start_ms, int64_t step_ms,
                           int n) {
  Trajectory t;
  t.start_ms = start_ms;
  t.step_ms = step_ms;
  DiscreteState x;
  x.p = p;
  t.states.assign(n + 1, x);
  t.inputs.assign(n, Vec3::Zero());
  return t;
}

Trajectory FallbackBrake(const Trajectory &prev) {
  Trajectory out = prev;
  if (prev.states.empty()) return out;
  out.start_ms = prev.start_ms + prev.step_ms;
  out.states.erase(out.states.begin());
  DiscreteState hover;
  hover.p = prev.states.back().p;
  out.states.push_back(hover);
  if (!out.inputs.empty()) {
    out.inputs.erase(out.inputs.begin());
    out.inputs.push_back(Vec3::Zero());
  }
  if (!out.binaries.empty()) {
    out.binaries.erase(out.binaries.begin());
    out.binaries.push_back(out.binaries.back());
  }
  return out;
}

}  // namespace explore
