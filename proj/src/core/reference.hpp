#pragma once

#include <optional>
#include <vector>

#include "core/corridor.hpp"
#include "core/dynamics.hpp"
#include "core/miqp.hpp"

namespace explore {

// arc length covered after t seconds when accelerating from rest at a_samp
// up to v_samp
double SampledArcLength(double t, double v_samp, double a_samp);

// point at arc length s along a polyline (clamped to its ends)
Vec3 PointAlong(const std::vector<Vec3> &polyline, double s);

// arc length of the polyline point closest to p
double ClosestArcLength(const std::vector<Vec3> &polyline, const Vec3 &p);

// Reference states x_0..x_N sampled along `path` from the point closest to
// x0 (positions only, velocities and accelerations zero). Samples outside
// every corridor polyhedron repeat the last sample that was inside (x0.p if
// none yet). When `prev` is given and x_N_pred is farther than thresh_dist
// from its last point, `prev` is returned unchanged.
std::vector<DiscreteState> SampleReference(
    const std::vector<Vec3> &path, const DiscreteState &x0,
    const std::vector<Polyhedron> &corridor, const MpcParams &params,
    const std::vector<DiscreteState> *prev, const Vec3 &x_N_pred);

}  // namespace explore
