#include "core/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace explore {

double SampledArcLength(double t, double v_samp, double a_samp) {
  if (t <= 0.0) return 0.0;
  if (a_samp <= 0.0) return v_samp * t;
  const double t_ramp = v_samp / a_samp;
  if (t <= t_ramp) return 0.5 * a_samp * t * t;
  return 0.5 * a_samp * t_ramp * t_ramp + v_samp * (t - t_ramp);
}

Vec3 PointAlong(const std::vector<Vec3> &polyline, double s) {
  if (polyline.empty()) return Vec3::Zero();
  if (s <= 0.0) return polyline.front();
  for (size_t i = 1; i < polyline.size(); ++i) {
    const double len = (polyline[i] - polyline[i - 1]).norm();
    if (s <= len && len > 0.0) {
      return polyline[i - 1] + (s / len) * (polyline[i] - polyline[i - 1]);
    }
    s -= len;
  }
  return polyline.back();
}

double ClosestArcLength(const std::vector<Vec3> &polyline, const Vec3 &p) {
  if (polyline.size() < 2) return 0.0;
  double best_d2 = std::numeric_limits<double>::infinity();
  double best_s = 0.0;
  double acc = 0.0;
  for (size_t i = 1; i < polyline.size(); ++i) {
    const Vec3 seg = polyline[i] - polyline[i - 1];
    const double len2 = seg.squaredNorm();
    double t = 0.0;
    if (len2 > 0.0) {
      t = std::clamp((p - polyline[i - 1]).dot(seg) / len2, 0.0, 1.0);
    }
    const double d2 = (polyline[i - 1] + t * seg - p).squaredNorm();
    const double len = std::sqrt(len2);
    if (d2 < best_d2) {
      best_d2 = d2;
      best_s = acc + t * len;
    }
    acc += len;
  }
  return best_s;
}

std::vector<DiscreteState> SampleReference(
    const std::vector<Vec3> &path, const DiscreteState &x0,
    const std::vector<Polyhedron> &corridor, const MpcParams &params,
    const std::vector<DiscreteState> *prev, const Vec3 &x_N_pred) {
  if (prev != nullptr && !prev->empty() &&
      (x_N_pred - prev->back().p).norm() > params.thresh_dist) {
    return *prev;
  }
  std::vector<DiscreteState> ref(params.N + 1);
  double total = 0.0;
  for (size_t i = 1; i < path.size(); ++i) total += (path[i] - path[i - 1]).norm();
  if (total == 0.0) {
    for (DiscreteState &r : ref) r.p = x0.p;
    return ref;
  }
  const double s0 = ClosestArcLength(path, x0.p);
  Vec3 last_inside = x0.p;
  for (int k = 0; k <= params.N; ++k) {
    const double s =
        s0 + SampledArcLength(k * params.h, params.v_samp, params.a_samp);
    const Vec3 p = PointAlong(path, s);
    bool inside = corridor.empty();
    for (const Polyhedron &poly : corridor) {
      if (poly.Contains(p, 1e-9)) {
        inside = true;
        break;
      }
    }
    if (inside) last_inside = p;
    ref[k].p = last_inside;
  }
  return ref;
}

}  // namespace explore
