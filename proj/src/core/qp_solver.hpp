#pragma once

#include <Eigen/Dense>

#include <vector>

namespace explore {

// min 1/2 x'Hx + g'x  s.t.  Aeq x = beq,  Ain x <= bin
struct QpProblem {
  Eigen::MatrixXd H;
  Eigen::VectorXd g;
  Eigen::MatrixXd Aeq;
  Eigen::VectorXd beq;
  Eigen::MatrixXd Ain;
  Eigen::VectorXd bin;
};

enum class QpStatus { kOptimal, kInfeasible, kIterationLimit };

struct QpResult {
  QpStatus status = QpStatus::kInfeasible;
  Eigen::VectorXd x;
  double objective = 0.0;
  Eigen::VectorXd lambda_eq;   // multipliers, KKT form H x + g + Aeq'le + Ain'li = 0
  Eigen::VectorXd lambda_in;   // >= 0
  std::vector<int> active;     // active inequality rows at the solution
  int iterations = 0;
};

// Dual active-set method of Goldfarb and Idnani for strictly convex QPs.
// `hint` lists inequality rows that are tried first when several are
// violated (typically the active set of a related problem); it only changes
// the order of pivots, never the answer.
QpResult SolveQp(const QpProblem &qp, const std::vector<int> *hint = nullptr,
                 int max_iterations = 2000);

// max-norm KKT residual: stationarity, primal feasibility, dual feasibility
// and complementarity
double KktResidual(const QpProblem &qp, const QpResult &result);

}  // namespace explore
