#pragma once

#include <optional>
#include <vector>

#include "core/corridor.hpp"
#include "core/dynamics.hpp"

namespace explore {

struct MpcParams {
  int N = 12;
  double h = 0.1;
  Vec3 a_max = Vec3::Constant(0.7 * kGravity);  // z entry is the upper bound
  double a_z_min = -kGravity;
  Vec3 j_max = Vec3::Constant(8.0);
  Vec3 drag = Vec3::Ones();  // diagonal of the linear drag matrix
  int p_hor = 2;
  Eigen::Matrix<double, 9, 1> r_x =
      (Eigen::Matrix<double, 9, 1>() << 200, 200, 200, 0, 0, 0, 0, 0, 0)
          .finished();
  Eigen::Matrix<double, 9, 1> r_n =
      (Eigen::Matrix<double, 9, 1>() << 100, 100, 100, 0, 0, 0, 0, 0, 0)
          .finished();
  Vec3 r_u = Vec3::Constant(0.01);
  double big_m = 100.0;
  double v_samp = 3.5;
  double a_samp = 0.7 * kGravity;
  double thresh_dist = 0.4;
  double d_rad = 0.3;
  // branch and bound
  double mip_gap = 1e-4;
  int max_nodes = 400;
  // polyhedron and hyperplane rows are tightened by this much so that
  // solutions satisfy them exactly despite round-off
  double tighten = 1e-7;
};

struct MiqpStats {
  int nodes = 0;
  int qp_iterations = 0;
  bool node_limit = false;  // stopped on the node budget
};

struct MiqpSolution {
  Trajectory trajectory;
  double objective = 0.0;
  double best_bound = 0.0;
  double kkt_residual = 0.0;  // of the QP that produced the incumbent
};

// Solves the corridor-constrained MPC. `reference` has N+1 states (only the
// components with nonzero weight matter). `seed` is a binary pattern [k][p]
// tried first as an incumbent. Returns nullopt when infeasible or when the
// node budget runs out before any feasible pattern is found.
std::optional<MiqpSolution> SolveMiqp(
    const MpcParams &params, const DiscreteState &x0,
    const std::vector<DiscreteState> &reference, const TimeAwareCorridor &tac,
    const std::vector<std::vector<uint8_t>> *seed, MiqpStats *stats);

// objective of a trajectory against a reference
double MpcObjective(const MpcParams &params, const Trajectory &traj,
                    const std::vector<DiscreteState> &reference);

// largest violation of bounds, terminal and corridor constraints (segment k
// must lie in at least one polyhedron of step k, checked without big-M)
double ConstraintViolation(const MpcParams &params, const Trajectory &traj,
                           const TimeAwareCorridor &tac);

}  // namespace explore
