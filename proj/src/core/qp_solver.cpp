#include "core/qp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace explore {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();
// rows are unit-norm internally, so this is a distance
constexpr double kFeasTol = 1e-10;

// Active-set factorization: J = L^-T Q, R upper triangular, for the
// constraints in the active set (Goldfarb & Idnani 1983).
class DualActiveSet {
 public:
  DualActiveSet(const Eigen::MatrixXd &J) : n_(J.rows()), J_(J) {
    R_.setZero(n_, n_);
    d_.setZero(n_);
    z_.setZero(n_);
    r_.setZero(n_);
  }

  int n() const { return n_; }
  int iq() const { return iq_; }

  // step direction for a constraint with normal np (relative to the
  // current active set): fills d, z, r
  void Direction(const Eigen::VectorXd &np) {
    d_.noalias() = J_.transpose() * np;
    if (iq_ < n_) {
      z_.noalias() = J_.rightCols(n_ - iq_) * d_.tail(n_ - iq_);
    } else {
      z_.setZero();
    }
    if (iq_ > 0) {
      r_.head(iq_) = R_.topLeftCorner(iq_, iq_)
                         .triangularView<Eigen::Upper>()
                         .solve(d_.head(iq_));
    }
  }

  const Eigen::VectorXd &z() const { return z_; }
  const Eigen::VectorXd &r() const { return r_; }

  // appends the constraint whose d was computed last; false if it is
  // linearly dependent on the active ones
  bool Add() {
    for (int j = n_ - 1; j >= iq_ + 1; --j) {
      double cc = d_(j - 1), ss = d_(j);
      const double h = std::hypot(cc, ss);
      if (h == 0.0) continue;
      d_(j) = 0.0;
      ss /= h;
      cc /= h;
      if (cc < 0.0) {
        cc = -cc;
        ss = -ss;
        d_(j - 1) = -h;
      } else {
        d_(j - 1) = h;
      }
      const double xny = ss / (1.0 + cc);
      for (int k = 0; k < n_; ++k) {
        const double t1 = J_(k, j - 1), t2 = J_(k, j);
        J_(k, j - 1) = t1 * cc + t2 * ss;
        J_(k, j) = xny * (t1 + J_(k, j - 1)) - t2;
      }
    }
    ++iq_;
    R_.col(iq_ - 1).head(iq_) = d_.head(iq_);
    if (std::abs(d_(iq_ - 1)) <= kEps * r_norm_) return false;
    r_norm_ = std::max(r_norm_, std::abs(d_(iq_ - 1)));
    return true;
  }

  // removes active position qq and restores the triangular factor
  void Remove(int qq) {
    for (int i = qq; i < iq_ - 1; ++i) R_.col(i) = R_.col(i + 1);
    R_.col(iq_ - 1).setZero();
    --iq_;
    if (iq_ == 0) return;
    for (int j = qq; j < iq_; ++j) {
      double cc = R_(j, j), ss = R_(j + 1, j);
      const double h = std::hypot(cc, ss);
      if (h == 0.0) continue;
      cc /= h;
      ss /= h;
      R_(j + 1, j) = 0.0;
      if (cc < 0.0) {
        R_(j, j) = -h;
        cc = -cc;
        ss = -ss;
      } else {
        R_(j, j) = h;
      }
      const double xny = ss / (1.0 + cc);
      for (int k = j + 1; k < iq_; ++k) {
        const double t1 = R_(j, k), t2 = R_(j + 1, k);
        R_(j, k) = t1 * cc + t2 * ss;
        R_(j + 1, k) = xny * (t1 + R_(j, k)) - t2;
      }
      for (int k = 0; k < n_; ++k) {
        const double t1 = J_(k, j), t2 = J_(k, j + 1);
        J_(k, j) = t1 * cc + t2 * ss;
        J_(k, j + 1) = xny * (J_(k, j) + t1) - t2;
      }
    }
  }

 private:
  int n_;
  int iq_ = 0;
  double r_norm_ = 1.0;
  Eigen::MatrixXd J_, R_;
  Eigen::VectorXd d_, z_, r_;
};

}  // namespace

QpResult SolveQp(const QpProblem &qp, const std::vector<int> *hint,
                 int max_iterations) {
  const int n = static_cast<int>(qp.H.rows());
  const int me = static_cast<int>(qp.Aeq.rows());
  const int mi = static_cast<int>(qp.Ain.rows());
  QpResult res;

  Eigen::LLT<Eigen::MatrixXd> chol(qp.H);
  if (chol.info() != Eigen::Success) {
    res.status = QpStatus::kInfeasible;
    return res;
  }

  // internal form: n_i . x + c0_i >= 0 (inequalities, unit rows) and
  // n_i . x + c0_i = 0 (equalities)
  Eigen::MatrixXd ni(n, mi);
  Eigen::VectorXd ci(mi), scale(mi);
  for (int i = 0; i < mi; ++i) {
    double norm = qp.Ain.row(i).norm();
    if (norm < 1e-300) norm = 1.0;
    scale(i) = norm;
    ni.col(i) = -qp.Ain.row(i).transpose() / norm;
    ci(i) = qp.bin(i) / norm;
  }

  Eigen::MatrixXd J = Eigen::MatrixXd::Identity(n, n);
  J = chol.matrixU().solve(J);
  DualActiveSet fac(J);

  Eigen::VectorXd x = -chol.solve(qp.g);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n + 1);
  std::vector<int> active(n + 1, 0);  // eq: -(i+1), ineq: row index
  int iterations = 0;

  for (int i = 0; i < me; ++i) {
    const Eigen::VectorXd np = qp.Aeq.row(i).transpose();
    fac.Direction(np);
    const int iq = fac.iq();
    const double zn = fac.z().dot(np);
    double t2 = 0.0;
    if (std::abs(fac.z().dot(fac.z())) > kEps) {
      t2 = -(np.dot(x) - qp.beq(i)) / zn;
    }
    x += t2 * fac.z();
    u(iq) = t2;
    u.head(iq) -= t2 * fac.r().head(iq);
    active[iq] = -i - 1;
    if (!fac.Add()) {
      res.status = QpStatus::kInfeasible;
      return res;
    }
  }

  std::vector<char> is_active(mi, 0), excluded(mi, 0), in_hint(mi, 0);
  if (hint != nullptr) {
    for (int h : *hint) {
      if (h >= 0 && h < mi) in_hint[h] = 1;
    }
  }
  Eigen::VectorXd s(mi);
  Eigen::VectorXd u_old(n + 1), x_old(n);
  std::vector<int> active_old(n + 1);

  auto find_pos = [&](int row) {
    for (int k = me; k < fac.iq(); ++k) {
      if (active[k] == row) return k;
    }
    return -1;
  };
  auto drop = [&](int row) {
    const int qq = find_pos(row);
    const int iq = fac.iq();
    for (int k = qq; k < iq - 1; ++k) {
      active[k] = active[k + 1];
      u(k) = u(k + 1);
    }
    active[iq - 1] = active[iq];
    u(iq - 1) = u(iq);
    active[iq] = 0;
    u(iq) = 0.0;
    is_active[row] = 0;
    fac.Remove(qq);
  };

  while (true) {
    // step 1: pick a violated constraint
    if (++iterations > max_iterations) {
      res.status = QpStatus::kIterationLimit;
      return res;
    }
    std::fill(excluded.begin(), excluded.end(), 0);
    if (mi > 0) s.noalias() = ni.transpose() * x + ci;
    u_old = u;
    x_old = x;
    active_old = active;
    const int iq_old = fac.iq();

  choose:
    int ip = -1;
    {
      double worst = -kFeasTol, worst_hint = -kFeasTol;
      int ip_hint = -1;
      for (int i = 0; i < mi; ++i) {
        if (is_active[i] || excluded[i]) continue;
        if (s(i) < worst) {
          worst = s(i);
          ip = i;
        }
        if (in_hint[i] && s(i) < worst_hint) {
          worst_hint = s(i);
          ip_hint = i;
        }
      }
      if (ip_hint >= 0) ip = ip_hint;
    }
    if (ip < 0) break;  // primal feasible: optimal

    const Eigen::VectorXd np = ni.col(ip);
    u(fac.iq()) = 0.0;
    active[fac.iq()] = ip;

    bool restart = false;
    while (true) {
      if (++iterations > max_iterations) {
        res.status = QpStatus::kIterationLimit;
        return res;
      }
      fac.Direction(np);
      const int iq = fac.iq();
      // partial step: largest dual step keeping multipliers >= 0
      double t1 = kInf;
      int l = -1;
      for (int k = me; k < iq; ++k) {
        if (fac.r()(k) > 0.0) {
          const double tmp = u(k) / fac.r()(k);
          if (tmp < t1) {
            t1 = tmp;
            l = active[k];
          }
        }
      }
      // full step: makes constraint ip active
      double t2 = kInf;
      if (std::abs(fac.z().dot(fac.z())) > kEps) {
        t2 = -s(ip) / fac.z().dot(np);
      }
      const double t = std::min(t1, t2);
      if (t >= kInf) {
        res.status = QpStatus::kInfeasible;
        res.iterations = iterations;
        return res;
      }
      if (t2 >= kInf) {
        // step in dual space only
        u.head(iq) -= t * fac.r().head(iq);
        u(iq) += t;
        drop(l);
        continue;
      }
      x += t * fac.z();
      u.head(iq) -= t * fac.r().head(iq);
      u(iq) += t;
      if (t == t2) {
        if (!fac.Add()) {
          // degenerate: undo this round and skip ip
          excluded[ip] = 1;
          const int iq_now = fac.iq();
          for (int k = iq_now - 1; k >= me; --k) fac.Remove(k);
          std::fill(is_active.begin(), is_active.end(), 0);
          // rebuild the factorization of the saved active set
          for (int k = me; k < iq_old; ++k) {
            fac.Direction(ni.col(active_old[k]));
            fac.Add();
            is_active[active_old[k]] = 1;
          }
          active = active_old;
          u = u_old;
          x = x_old;
          if (mi > 0) s.noalias() = ni.transpose() * x + ci;
          restart = true;
        } else {
          is_active[ip] = 1;
        }
        break;
      }
      // partial step: drop the blocking constraint and keep going
      drop(l);
      s(ip) = np.dot(x) + ci(ip);
    }
    if (restart) goto choose;
  }

  res.status = QpStatus::kOptimal;
  res.x = x;
  res.objective = 0.5 * x.dot(qp.H * x) + qp.g.dot(x);
  res.lambda_eq = Eigen::VectorXd::Zero(me);
  res.lambda_in = Eigen::VectorXd::Zero(mi);
  for (int k = 0; k < fac.iq(); ++k) {
    if (active[k] < 0) {
      res.lambda_eq(-active[k] - 1) = -u(k);
    } else {
      res.lambda_in(active[k]) = u(k) / scale(active[k]);
      res.active.push_back(active[k]);
    }
  }
  std::sort(res.active.begin(), res.active.end());
  res.iterations = iterations;
  return res;
}

double KktResidual(const QpProblem &qp, const QpResult &result) {
  const Eigen::VectorXd &x = result.x;
  Eigen::VectorXd grad = qp.H * x + qp.g;
  if (qp.Aeq.rows() > 0) grad += qp.Aeq.transpose() * result.lambda_eq;
  if (qp.Ain.rows() > 0) grad += qp.Ain.transpose() * result.lambda_in;
  double res = grad.cwiseAbs().maxCoeff();
  if (qp.Aeq.rows() > 0) {
    res = std::max(res, (qp.Aeq * x - qp.beq).cwiseAbs().maxCoeff());
  }
  for (int i = 0; i < qp.Ain.rows(); ++i) {
    const double slack = qp.bin(i) - qp.Ain.row(i).dot(x);
    res = std::max(res, std::max(0.0, -slack));
    res = std::max(res, std::max(0.0, -result.lambda_in(i)));
    res = std::max(res, std::abs(result.lambda_in(i) * slack));
  }
  return res;
}

}  // namespace explore
