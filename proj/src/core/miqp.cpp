#include "core/miqp.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "core/qp_solver.hpp"

namespace explore {

namespace {

// per-axis condensed dynamics: state_k = c[k] + G[k] * u_axis
struct AxisMaps {
  std::vector<Eigen::Vector3d> c;
  std::vector<Eigen::Matrix<double, 3, Eigen::Dynamic>> G;
};

AxisMaps Condense(double p0, double v0, double a0, double h, double drag,
                  int n) {
  Eigen::Matrix3d A;
  A << 1, h, 0, 0, 1 - h * drag, h, 0, 0, 1;
  AxisMaps m;
  m.c.resize(n + 1);
  m.G.resize(n + 1);
  m.c[0] = Eigen::Vector3d(p0, v0, a0);
  m.G[0].setZero(3, n);
  for (int k = 1; k <= n; ++k) {
    m.c[k] = A * m.c[k - 1];
    m.G[k] = A * m.G[k - 1];
    m.G[k](2, k - 1) += h;
  }
  return m;
}

// linear row over u (3N) and at most one binary: u_coef.u + bin_coef*b <= rhs
struct Row {
  Eigen::RowVectorXd u_coef;
  double rhs = 0.0;
  int bin = -1;
  double bin_coef = 0.0;
};

enum : int8_t { kFree = -1 };

class MiqpModel {
 public:
  MiqpModel(const MpcParams &params, const DiscreteState &x0,
            const std::vector<DiscreteState> &ref,
            const TimeAwareCorridor &tac)
      : prm_(params), n_(params.N), nu_(3 * params.N),
        np_(static_cast<int>(tac.base.size())) {
    for (int i = 0; i < 3; ++i) {
      axis_[i] = Condense(x0.p[i], x0.v[i], x0.a[i], prm_.h, prm_.drag[i], n_);
    }
    BuildObjective(ref);
    BuildHardRows(tac);
    BuildBinaryRows(x0, tac);
  }

  int num_binaries() const { return n_ * np_; }
  int Bin(int k, int p) const { return k * np_ + p; }
  const std::vector<int8_t> &root_fixed() const { return root_fixed_; }
  bool root_infeasible() const { return root_infeasible_; }

  struct NodeQp {
    QpProblem qp;
    std::vector<int> keys;      // global key per inequality row
    std::vector<int> free_bins; // binary index per extra variable
    bool infeasible = false;
  };

  NodeQp Build(const std::vector<int8_t> &fixed) const {
    NodeQp out;
    std::vector<int> col(num_binaries(), -1);
    for (int b = 0; b < num_binaries(); ++b) {
      if (fixed[b] == kFree) {
        col[b] = nu_ + static_cast<int>(out.free_bins.size());
        out.free_bins.push_back(b);
      }
    }
    const int nv = nu_ + static_cast<int>(out.free_bins.size());
    QpProblem &qp = out.qp;
    qp.H = Eigen::MatrixXd::Zero(nv, nv);
    qp.H.topLeftCorner(nu_, nu_) = H_;
    for (int i = nu_; i < nv; ++i) qp.H(i, i) = 2.0 * kBinaryReg;
    qp.g = Eigen::VectorXd::Zero(nv);
    qp.g.head(nu_) = g_;
    qp.Aeq = Eigen::MatrixXd::Zero(eq_rows_.size(), nv);
    qp.beq.resize(eq_rows_.size());
    for (size_t i = 0; i < eq_rows_.size(); ++i) {
      qp.Aeq.row(i).head(nu_) = eq_rows_[i].u_coef;
      qp.beq(i) = eq_rows_[i].rhs;
    }

    // count rows first
    std::vector<int> use;  // index into rows_, or encoded extra rows
    for (size_t r = 0; r < rows_.size(); ++r) {
      const Row &row = rows_[r];
      if (row.bin >= 0 && fixed[row.bin] == 0) continue;
      use.push_back(static_cast<int>(r));
    }
    std::vector<int> sum_steps;
    for (int k = 0; k < n_; ++k) {
      bool has_one = false, has_free = false;
      for (int p = 0; p < np_; ++p) {
        const int8_t f = fixed[Bin(k, p)];
        has_one |= f == 1;
        has_free |= f == kFree;
      }
      if (has_one) continue;
      if (!has_free) {
        out.infeasible = true;
        return out;
      }
      sum_steps.push_back(k);
    }
    const int nfree = static_cast<int>(out.free_bins.size());
    const int m = static_cast<int>(use.size() + sum_steps.size()) + 2 * nfree;
    qp.Ain = Eigen::MatrixXd::Zero(m, nv);
    qp.bin = Eigen::VectorXd::Zero(m);
    out.keys.reserve(m);
    int r = 0;
    for (int idx : use) {
      const Row &row = rows_[idx];
      qp.Ain.row(r).head(nu_) = row.u_coef;
      qp.bin(r) = row.rhs;
      if (row.bin >= 0) {
        if (fixed[row.bin] == 1) {
          qp.bin(r) -= row.bin_coef;
        } else {
          qp.Ain(r, col[row.bin]) = row.bin_coef;
        }
      }
      out.keys.push_back(idx);
      ++r;
    }
    const int base_key = static_cast<int>(rows_.size());
    for (int k : sum_steps) {
      for (int p = 0; p < np_; ++p) {
        if (fixed[Bin(k, p)] == kFree) qp.Ain(r, col[Bin(k, p)]) = -1.0;
      }
      qp.bin(r) = -1.0;
      out.keys.push_back(base_key + k);
      ++r;
    }
    for (int j = 0; j < nfree; ++j) {
      const int b = out.free_bins[j];
      qp.Ain(r, nu_ + j) = 1.0;
      qp.bin(r) = 1.0;
      out.keys.push_back(base_key + n_ + 2 * b);
      ++r;
      qp.Ain(r, nu_ + j) = -1.0;
      qp.bin(r) = 0.0;
      out.keys.push_back(base_key + n_ + 2 * b + 1);
      ++r;
    }
    return out;
  }

  double constant() const { return const_; }

  Trajectory Rollout(const DiscreteState &x0, const Eigen::VectorXd &u) const {
    Trajectory t;
    t.step_ms = static_cast<int64_t>(std::llround(prm_.h * 1000.0));
    t.states.push_back(x0);
    for (int k = 0; k < n_; ++k) {
      const Vec3 uk(u(k), u(n_ + k), u(2 * n_ + k));
      t.inputs.push_back(uk);
      t.states.push_back(EulerStep(t.states.back(), uk, prm_.h, prm_.drag));
    }
    return t;
  }

  static constexpr double kBinaryReg = 1e-6;

 private:
  // u index of axis i, step k
  int U(int i, int k) const { return i * n_ + k; }

  Eigen::RowVectorXd PositionRow(const Vec3 &normal, int k, double *offset)
      const {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(nu_);
    *offset = 0.0;
    for (int i = 0; i < 3; ++i) {
      if (normal[i] == 0.0) continue;
      row.segment(i * n_, n_) += normal[i] * axis_[i].G[k].row(0);
      *offset += normal[i] * axis_[i].c[k](0);
    }
    return row;
  }

  void BuildObjective(const std::vector<DiscreteState> &ref) {
    H_ = Eigen::MatrixXd::Zero(nu_, nu_);
    g_ = Eigen::VectorXd::Zero(nu_);
    const_ = 0.0;
    for (int i = 0; i < 3; ++i) {
      Eigen::MatrixXd Hi = Eigen::MatrixXd::Zero(n_, n_);
      Eigen::VectorXd gi = Eigen::VectorXd::Zero(n_);
      for (int k = 0; k <= n_; ++k) {
        const auto &w = k < n_ ? prm_.r_x : prm_.r_n;
        const Eigen::Vector3d wk(w[i], w[3 + i], w[6 + i]);
        const Eigen::Vector3d r(ref[k].p[i], ref[k].v[i], ref[k].a[i]);
        const Eigen::Vector3d e = axis_[i].c[k] - r;
        const auto &G = axis_[i].G[k];
        Hi.noalias() += 2.0 * G.transpose() * wk.asDiagonal() * G;
        gi.noalias() += 2.0 * G.transpose() * wk.cwiseProduct(e);
        const_ += e.dot(wk.cwiseProduct(e));
      }
      Hi.diagonal().array() += 2.0 * prm_.r_u[i] + 1e-10;
      H_.block(i * n_, i * n_, n_, n_) = Hi;
      g_.segment(i * n_, n_) = gi;
    }
  }

  void BuildHardRows(const TimeAwareCorridor &tac) {
    // terminal rest
    for (int i = 0; i < 3; ++i) {
      for (int comp = 1; comp <= 2; ++comp) {
        Row row;
        row.u_coef = Eigen::RowVectorXd::Zero(nu_);
        row.u_coef.segment(i * n_, n_) = axis_[i].G[n_].row(comp);
        row.rhs = -axis_[i].c[n_](comp);
        eq_rows_.push_back(row);
      }
    }
    // jerk box
    for (int i = 0; i < 3; ++i) {
      for (int k = 0; k < n_; ++k) {
        for (int sign : {1, -1}) {
          Row row;
          row.u_coef = Eigen::RowVectorXd::Zero(nu_);
          row.u_coef(U(i, k)) = sign;
          row.rhs = prm_.j_max[i];
          rows_.push_back(row);
        }
      }
    }
    // acceleration bounds on the free points 1..N-1 (a_N is pinned to 0)
    for (int i = 0; i < 3; ++i) {
      const double hi = prm_.a_max[i];
      const double lo = i == 2 ? prm_.a_z_min : -prm_.a_max[i];
      for (int k = 1; k < n_; ++k) {
        Row up;
        up.u_coef = Eigen::RowVectorXd::Zero(nu_);
        up.u_coef.segment(i * n_, n_) = axis_[i].G[k].row(2);
        up.rhs = hi - axis_[i].c[k](2);
        Row down;
        down.u_coef = -up.u_coef;
        down.rhs = -(lo - axis_[i].c[k](2));
        rows_.push_back(up);
        rows_.push_back(down);
      }
    }
    // inter-agent hyperplanes: step k binds points k and k+1 (point 0 is
    // fixed and owned by the previous plan)
    for (int k = 0; k < n_ && k < tac.steps(); ++k) {
      for (const Halfspace &hs : tac.extra[k]) {
        for (int pt : {k, k + 1}) {
          if (pt == 0) continue;
          double off = 0.0;
          Row row;
          row.u_coef = PositionRow(hs.normal, pt, &off);
          row.rhs = hs.offset - prm_.tighten - off;
          rows_.push_back(row);
        }
      }
    }
  }

  void BuildBinaryRows(const DiscreteState &x0, const TimeAwareCorridor &tac) {
    root_fixed_.assign(num_binaries(), kFree);
    const double big_m = prm_.big_m;
    for (int k = 0; k < n_; ++k) {
      for (int p = 0; p < np_; ++p) {
        const int b = Bin(k, p);
        const Polyhedron &poly = tac.base[p];
        bool usable = k < tac.steps() && !IsEmpty(tac.At(k, p).halfspaces);
        if (usable && k == 0 && !poly.Contains(x0.p, 1e-9)) usable = false;
        if (!usable) {
          root_fixed_[b] = 0;
          continue;
        }
        for (const Halfspace &hs : poly.halfspaces) {
          for (int pt : {k, k + 1}) {
            if (pt == 0) continue;
            double off = 0.0;
            Row row;
            row.u_coef = PositionRow(hs.normal, pt, &off);
            const double rhs = hs.offset - prm_.tighten - off;
            // the largest violation any jerk sequence can produce is a
            // valid and much tighter big-M than the global one
            double reach = 0.0;
            for (int j = 0; j < nu_; ++j) {
              reach += std::abs(row.u_coef(j)) * prm_.j_max[j / n_];
            }
            const double m = std::clamp(reach - rhs, 0.0, big_m);
            row.rhs = rhs + m;
            row.bin = b;
            row.bin_coef = m;
            rows_.push_back(row);
          }
        }
      }
      // a single candidate polyhedron is forced
      int free_count = 0, last_free = -1;
      for (int p = 0; p < np_; ++p) {
        if (root_fixed_[Bin(k, p)] == kFree) {
          ++free_count;
          last_free = p;
        }
      }
      if (free_count == 0) root_infeasible_ = true;
      if (free_count == 1) root_fixed_[Bin(k, last_free)] = 1;
    }
  }

  const MpcParams &prm_;
  int n_, nu_, np_;
  std::array<AxisMaps, 3> axis_;
  Eigen::MatrixXd H_;
  Eigen::VectorXd g_;
  double const_ = 0.0;
  std::vector<Row> eq_rows_;
  std::vector<Row> rows_;
  std::vector<int8_t> root_fixed_;
  bool root_infeasible_ = false;
};

struct Node {
  std::vector<int8_t> fixed;
  double bound = 0.0;
  std::vector<int> hint_keys;
  int id = 0;
};

struct NodeOrder {
  bool operator()(const Node &a, const Node &b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    // equal bounds are common (degenerate relaxations): go deep first
    return a.id < b.id;
  }
};

}  // namespace

std::optional<MiqpSolution> SolveMiqp(
    const MpcParams &params, const DiscreteState &x0,
    const std::vector<DiscreteState> &reference, const TimeAwareCorridor &tac,
    const std::vector<std::vector<uint8_t>> *seed, MiqpStats *stats) {
  MiqpStats local_stats;
  MiqpStats &st = stats ? *stats : local_stats;
  st = MiqpStats{};
  if (static_cast<int>(reference.size()) != params.N + 1) {
    throw Error(ErrorCode::kInvalidArgument, "reference must have N+1 states");
  }
  if (tac.base.empty()) return std::nullopt;

  const MiqpModel model(params, x0, reference, tac);
  if (model.root_infeasible()) return std::nullopt;
  const int nb = model.num_binaries();
  const int np = static_cast<int>(tac.base.size());

  std::optional<MiqpSolution> best;
  double incumbent = std::numeric_limits<double>::infinity();
  std::vector<int8_t> best_pattern;

  auto hint_from = [](const MiqpModel::NodeQp &nq,
                      const std::vector<int> &keys) {
    std::vector<int> local;
    if (keys.empty()) return local;
    size_t j = 0;
    for (size_t r = 0; r < nq.keys.size() && j < keys.size(); ++r) {
      while (j < keys.size() && keys[j] < nq.keys[r]) ++j;
      if (j < keys.size() && keys[j] == nq.keys[r]) {
        local.push_back(static_cast<int>(r));
      }
    }
    return local;
  };
  auto active_keys = [](const MiqpModel::NodeQp &nq, const QpResult &res) {
    std::vector<int> keys;
    for (int r : res.active) keys.push_back(nq.keys[r]);
    std::sort(keys.begin(), keys.end());
    return keys;
  };

  // solves with every binary fixed; updates the incumbent
  auto try_leaf = [&](const std::vector<int8_t> &pattern,
                      const std::vector<int> &hint_keys) {
    const MiqpModel::NodeQp nq = model.Build(pattern);
    if (nq.infeasible) return;
    const std::vector<int> hint = hint_from(nq, hint_keys);
    const QpResult res = SolveQp(nq.qp, &hint);
    st.qp_iterations += res.iterations;
    if (res.status != QpStatus::kOptimal) return;
    const double obj = res.objective + model.constant();
    if (obj < incumbent) {
      incumbent = obj;
      best_pattern = pattern;
      MiqpSolution sol;
      sol.trajectory = model.Rollout(x0, res.x);
      sol.objective = obj;
      sol.kkt_residual = KktResidual(nq.qp, res);
      best = sol;
    }
  };

  if (seed != nullptr && static_cast<int>(seed->size()) == params.N) {
    std::vector<int8_t> pattern = model.root_fixed();
    bool ok = true;
    for (int k = 0; k < params.N && ok; ++k) {
      bool any = false;
      for (int p = 0; p < np; ++p) {
        int8_t &f = pattern[model.Bin(k, p)];
        if (f != kFree) {
          any |= f == 1;
          continue;
        }
        const bool on = p < static_cast<int>((*seed)[k].size()) &&
                        (*seed)[k][p] != 0;
        f = on ? 1 : 0;
        any |= on;
      }
      if (!any) {
        // the seed has nothing usable here: take the first candidate
        for (int p = 0; p < np && !any; ++p) {
          if (model.root_fixed()[model.Bin(k, p)] == kFree) {
            pattern[model.Bin(k, p)] = 1;
            any = true;
          }
        }
      }
      ok = any;
    }
    if (ok) try_leaf(pattern, {});
  }

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  int next_id = 0;
  open.push({model.root_fixed(), -std::numeric_limits<double>::infinity(), {},
             next_id++});
  double best_bound = -std::numeric_limits<double>::infinity();
  auto gap_closed = [&](double bound) {
    return bound >= incumbent - params.mip_gap * std::max(std::abs(incumbent),
                                                          1e-9);
  };

  while (!open.empty()) {
    if (st.nodes >= params.max_nodes) {
      st.node_limit = true;
      break;
    }
    Node node = open.top();
    open.pop();
    best_bound = node.bound;
    if (best && gap_closed(node.bound)) {
      best_bound = node.bound;
      open = {};
      break;
    }
    ++st.nodes;
    const MiqpModel::NodeQp nq = model.Build(node.fixed);
    if (nq.infeasible) continue;
    const std::vector<int> hint = hint_from(nq, node.hint_keys);
    const QpResult res = SolveQp(nq.qp, &hint);
    st.qp_iterations += res.iterations;
    if (res.status != QpStatus::kOptimal) continue;
    const int nfree = static_cast<int>(nq.free_bins.size());
    const double bound = res.objective + model.constant() -
                         MiqpModel::kBinaryReg * nfree;
    if (best && gap_closed(bound)) continue;

    int branch = -1;
    double most = 1e-6;
    for (int j = 0; j < nfree; ++j) {
      const double v = res.x(3 * params.N + j);
      const double frac = std::min(v, 1.0 - v);
      if (frac > most) {
        most = frac;
        branch = nq.free_bins[j];
      }
    }
    const std::vector<int> keys = active_keys(nq, res);
    if (branch >= 0 && (!best || st.nodes % 16 == 1)) {
      // rounding heuristic: the strongest binary per step, once as is and
      // once forced to move forward along the polyhedron order
      std::vector<double> value(nb, 0.0);
      for (int i = 0; i < nb; ++i) value[i] = node.fixed[i] == 1 ? 1.0 : 0.0;
      for (int j = 0; j < nfree; ++j) {
        value[nq.free_bins[j]] = res.x(3 * params.N + j);
      }
      for (bool monotone : {false, true}) {
        std::vector<int8_t> pattern(nb, 0);
        bool ok = true;
        int floor_p = 0;
        for (int k = 0; k < params.N && ok; ++k) {
          int pick = -1;
          for (int p = monotone ? floor_p : 0; p < np; ++p) {
            const int b = model.Bin(k, p);
            if (node.fixed[b] == 0) continue;
            if (pick < 0 || value[b] > value[model.Bin(k, pick)] + 1e-9) {
              pick = p;
            }
          }
          if (pick < 0) {
            ok = false;
            break;
          }
          floor_p = pick;
          pattern[model.Bin(k, pick)] = 1;
          for (int p = 0; p < np; ++p) {
            if (node.fixed[model.Bin(k, p)] == 1) pattern[model.Bin(k, p)] = 1;
          }
        }
        if (ok) try_leaf(pattern, keys);
      }
      if (best && gap_closed(bound)) continue;
    }
    if (branch < 0) {
      // integral relaxation: re-solve with the binaries pinned
      std::vector<int8_t> pattern = node.fixed;
      for (int j = 0; j < nfree; ++j) {
        pattern[nq.free_bins[j]] = res.x(3 * params.N + j) > 0.5 ? 1 : 0;
      }
      try_leaf(pattern, keys);
      continue;
    }
    for (int8_t value : {int8_t(1), int8_t(0)}) {
      Node child;
      child.fixed = node.fixed;
      child.fixed[branch] = value;
      child.bound = bound;
      child.hint_keys = keys;
      child.id = next_id++;
      open.push(std::move(child));
    }
  }
  if (open.empty() && !st.node_limit) best_bound = incumbent;

  if (!best) return std::nullopt;
  best->best_bound = std::min(best_bound, best->objective);
  best->trajectory.binaries.assign(params.N, std::vector<uint8_t>(np, 0));
  for (int k = 0; k < params.N; ++k) {
    for (int p = 0; p < np; ++p) {
      best->trajectory.binaries[k][p] = best_pattern[model.Bin(k, p)] == 1;
    }
  }
  return best;
}

double MpcObjective(const MpcParams &params, const Trajectory &traj,
                    const std::vector<DiscreteState> &reference) {
  double obj = 0.0;
  const int n = params.N;
  for (int k = 0; k <= n; ++k) {
    const auto &w = k < n ? params.r_x : params.r_n;
    const DiscreteState &x = traj.states[k];
    const DiscreteState &r = reference[k];
    for (int i = 0; i < 3; ++i) {
      obj += w[i] * std::pow(x.p[i] - r.p[i], 2) +
             w[3 + i] * std::pow(x.v[i] - r.v[i], 2) +
             w[6 + i] * std::pow(x.a[i] - r.a[i], 2);
    }
  }
  for (int k = 0; k < n; ++k) {
    obj += traj.inputs[k].cwiseAbs2().dot(params.r_u);
  }
  return obj;
}

double ConstraintViolation(const MpcParams &params, const Trajectory &traj,
                           const TimeAwareCorridor &tac) {
  double worst = 0.0;
  const int n = params.N;
  auto upd = [&](double v) { worst = std::max(worst, v); };
  upd(traj.states[n].v.cwiseAbs().maxCoeff());
  upd(traj.states[n].a.cwiseAbs().maxCoeff());
  for (int k = 0; k < n; ++k) {
    upd((traj.inputs[k].cwiseAbs() - params.j_max).maxCoeff());
  }
  for (int k = 1; k < n; ++k) {
    const Vec3 &a = traj.states[k].a;
    upd(a.x() - params.a_max.x());
    upd(-a.x() - params.a_max.x());
    upd(a.y() - params.a_max.y());
    upd(-a.y() - params.a_max.y());
    upd(a.z() - params.a_max.z());
    upd(params.a_z_min - a.z());
  }
  for (int k = 0; k < n && k < tac.steps(); ++k) {
    const Vec3 &p0 = traj.states[k].p;
    const Vec3 &p1 = traj.states[k + 1].p;
    for (const Halfspace &h : tac.extra[k]) {
      if (k > 0) upd(h.Violation(p0));
      upd(h.Violation(p1));
    }
    double best = std::numeric_limits<double>::infinity();
    for (const Polyhedron &poly : tac.base) {
      double v = -std::numeric_limits<double>::infinity();
      for (const Halfspace &h : poly.halfspaces) {
        if (k > 0) v = std::max(v, h.Violation(p0));
        v = std::max(v, h.Violation(p1));
      }
      best = std::min(best, v);
    }
    upd(best);
  }
  return worst;
}

}  // namespace explore
