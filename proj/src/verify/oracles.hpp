#pragma once

// Slow reference implementations used to check the fast paths. They share
// no search or solver code with the core.

#include <optional>
#include <vector>

#include "core/corridor.hpp"
#include "core/distance_field.hpp"
#include "core/frontier.hpp"
#include "core/miqp.hpp"
#include "core/path_search.hpp"

namespace explore::oracle {

// plain Dijkstra over 26 neighbors; returns the optimal step counts
std::optional<StepCounts> DijkstraSteps(const VoxelGrid &grid,
                                        const std::vector<uint8_t> &mask,
                                        const Index3 &start,
                                        const Index3 &goal);

// Dijkstra on step_length + weight * max(0, push - field(next))
std::optional<double> PenalizedDijkstra(const VoxelGrid &grid,
                                        const std::vector<uint8_t> &mask,
                                        const DistanceField &field,
                                        const Index3 &start, const Index3 &goal,
                                        double push_dist, double weight);

// pairwise scan: free voxels with an unknown voxel at Chebyshev distance 1
std::vector<int64_t> BorderVoxels(const VoxelGrid &grid);

// union-find components of the border set, each sorted, ordered by their
// smallest member
std::vector<std::vector<int64_t>> BorderComponents(
    const VoxelGrid &grid, const std::vector<int64_t> &borders);

// member closest to the floating-point centroid (ties within 1e-9 relative
// go to the smallest index)
int64_t ClosestToCentroid(const VoxelGrid &grid,
                          const std::vector<int64_t> &members);

// brute-force distance to the nearest non-free voxel center (meters)
std::vector<double> BruteDistanceField(const VoxelGrid &grid);

// Dense primal-dual interior point method for
// min 1/2 x'Hx + g'x  s.t.  Aeq x = beq, Ain x <= bin.
// Infeasibility is decided by a phase-one problem first.
struct IpmResult {
  bool feasible = false;
  Eigen::VectorXd x;
  double objective = 0.0;
};
IpmResult InteriorPointQp(const Eigen::MatrixXd &H, const Eigen::VectorXd &g,
                          const Eigen::MatrixXd &Aeq,
                          const Eigen::VectorXd &beq,
                          const Eigen::MatrixXd &Ain,
                          const Eigen::VectorXd &bin);

// Enumerates every binary pattern (at least one polyhedron per step) and
// solves each as a QP in states-and-inputs form. Returns the best objective.
std::optional<double> EnumerateMiqp(const MpcParams &params,
                                    const DiscreteState &x0,
                                    const std::vector<DiscreteState> &reference,
                                    const TimeAwareCorridor &tac);

}  // namespace explore::oracle
