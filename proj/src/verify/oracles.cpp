#include "verify/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>

namespace explore::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Item {
  double cost;
  int64_t lin;
  bool operator>(const Item &o) const {
    return cost != o.cost ? cost > o.cost : lin > o.lin;
  }
};

template <typename StepCost>
std::vector<double> Dijkstra(const VoxelGrid &grid,
                             const std::vector<uint8_t> &mask,
                             const Index3 &start, StepCost step_cost,
                             std::vector<int64_t> *parent) {
  const int64_t n = grid.size();
  std::vector<double> dist(n, kInf);
  parent->assign(n, -1);
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  const int64_t s = grid.Linear(start);
  dist[s] = 0.0;
  pq.push({0.0, s});
  while (!pq.empty()) {
    const Item it = pq.top();
    pq.pop();
    if (it.cost > dist[it.lin]) continue;
    const Index3 c = grid.Unlinear(it.lin);
    for (int dz = -1; dz <= 1; ++dz) {
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0 && dz == 0) continue;
          const Index3 nb = c + Index3(dx, dy, dz);
          if (!grid.Contains(nb)) continue;
          const int64_t nl = grid.Linear(nb);
          if (!mask[nl]) continue;
          const double nc = it.cost + step_cost(Index3(dx, dy, dz), nl);
          if (nc < dist[nl]) {
            dist[nl] = nc;
            (*parent)[nl] = it.lin;
            pq.push({nc, nl});
          }
        }
      }
    }
  }
  return dist;
}

double StepLength(const Index3 &d, double vs) {
  const int k = std::abs(d.x()) + std::abs(d.y()) + std::abs(d.z());
  return vs * std::sqrt(static_cast<double>(k));
}

}  // namespace

std::optional<StepCounts> DijkstraSteps(const VoxelGrid &grid,
                                        const std::vector<uint8_t> &mask,
                                        const Index3 &start,
                                        const Index3 &goal) {
  const double vs = grid.voxel_size();
  std::vector<int64_t> parent;
  const std::vector<double> dist = Dijkstra(
      grid, mask, start,
      [&](const Index3 &d, int64_t) { return StepLength(d, vs); }, &parent);
  const int64_t t = grid.Linear(goal);
  if (dist[t] == kInf) return std::nullopt;
  StepCounts counts;
  for (int64_t cur = t; parent[cur] >= 0; cur = parent[cur]) {
    const Index3 d = grid.Unlinear(cur) - grid.Unlinear(parent[cur]);
    const int k = std::abs(d.x()) + std::abs(d.y()) + std::abs(d.z());
    if (k == 1) ++counts.straight;
    if (k == 2) ++counts.planar;
    if (k == 3) ++counts.diagonal;
  }
  return counts;
}

std::optional<double> PenalizedDijkstra(const VoxelGrid &grid,
                                        const std::vector<uint8_t> &mask,
                                        const DistanceField &field,
                                        const Index3 &start, const Index3 &goal,
                                        double push_dist, double weight) {
  const double vs = grid.voxel_size();
  std::vector<int64_t> parent;
  const std::vector<double> dist = Dijkstra(
      grid, mask, start,
      [&](const Index3 &d, int64_t next) {
        return StepLength(d, vs) +
               weight * std::max(0.0, push_dist - field.distance[next]);
      },
      &parent);
  const double c = dist[grid.Linear(goal)];
  if (c == kInf) return std::nullopt;
  return c;
}

std::vector<int64_t> BorderVoxels(const VoxelGrid &grid) {
  std::vector<int64_t> unknown;
  for (int64_t i = 0; i < grid.size(); ++i) {
    if (grid.Get(i) == VoxelState::kUnknown) unknown.push_back(i);
  }
  std::vector<int64_t> out;
  for (int64_t i = 0; i < grid.size(); ++i) {
    if (grid.Get(i) != VoxelState::kFree) continue;
    const Index3 a = grid.Unlinear(i);
    for (int64_t j : unknown) {
      const Index3 d = (grid.Unlinear(j) - a).cwiseAbs();
      if (d.maxCoeff() == 1) {
        out.push_back(i);
        break;
      }
    }
  }
  return out;
}

std::vector<std::vector<int64_t>> BorderComponents(
    const VoxelGrid &grid, const std::vector<int64_t> &borders) {
  const size_t n = borders.size();
  std::vector<size_t> root(n);
  std::iota(root.begin(), root.end(), size_t{0});
  std::function<size_t(size_t)> find = [&](size_t x) {
    return root[x] == x ? x : root[x] = find(root[x]);
  };
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      const Index3 d =
          (grid.Unlinear(borders[i]) - grid.Unlinear(borders[j])).cwiseAbs();
      if (d.maxCoeff() <= 1) root[find(i)] = find(j);
    }
  }
  std::vector<std::vector<int64_t>> groups(n);
  for (size_t i = 0; i < n; ++i) groups[find(i)].push_back(borders[i]);
  std::vector<std::vector<int64_t>> out;
  for (auto &g : groups) {
    if (g.empty()) continue;
    std::sort(g.begin(), g.end());
    out.push_back(g);
  }
  std::sort(out.begin(), out.end(),
            [](const auto &a, const auto &b) { return a.front() < b.front(); });
  return out;
}

int64_t ClosestToCentroid(const VoxelGrid &grid,
                          const std::vector<int64_t> &members) {
  Vec3 mean = Vec3::Zero();
  for (int64_t m : members) mean += grid.Center(m);
  mean /= static_cast<double>(members.size());
  double best = kInf;
  int64_t arg = -1;
  for (int64_t m : members) {
    const double d = (grid.Center(m) - mean).norm();
    if (arg < 0) {
      best = d;
      arg = m;
      continue;
    }
    const double tol = 1e-9 * std::max(1.0, best);
    if (d < best - tol || (std::abs(d - best) <= tol && m < arg)) {
      best = std::min(best, d);
      arg = m;
    }
  }
  return arg;
}

std::vector<double> BruteDistanceField(const VoxelGrid &grid) {
  std::vector<int64_t> blocked;
  for (int64_t i = 0; i < grid.size(); ++i) {
    if (grid.Get(i) != VoxelState::kFree) blocked.push_back(i);
  }
  std::vector<double> out(grid.size(), kInf);
  for (int64_t i = 0; i < grid.size(); ++i) {
    const Vec3 c = grid.Center(i);
    for (int64_t j : blocked) {
      out[i] = std::min(out[i], (grid.Center(j) - c).norm());
    }
  }
  return out;
}

namespace {

// Mehrotra predictor-corrector; returns false when it fails to converge
bool Ipm(const Eigen::MatrixXd &H, const Eigen::VectorXd &g,
         const Eigen::MatrixXd &A, const Eigen::VectorXd &b,
         const Eigen::MatrixXd &C, const Eigen::VectorXd &d,
         const Eigen::VectorXd &x_start, Eigen::VectorXd *x_out) {
  const int n = static_cast<int>(H.rows());
  const int me = static_cast<int>(A.rows());
  const int mi = static_cast<int>(C.rows());
  Eigen::VectorXd x = x_start;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(me);
  Eigen::VectorXd s = (d - C * x).cwiseMax(1e-3);
  Eigen::VectorXd z = Eigen::VectorXd::Ones(mi);
  const double scale = 1.0 + std::max(g.lpNorm<Eigen::Infinity>(),
                                      d.size() ? d.lpNorm<Eigen::Infinity>()
                                               : 0.0);

  auto max_step = [](const Eigen::VectorXd &v, const Eigen::VectorXd &dv) {
    double a = 1.0;
    for (int i = 0; i < v.size(); ++i) {
      if (dv(i) < 0.0) a = std::min(a, -v(i) / dv(i));
    }
    return a;
  };

  for (int iter = 0; iter < 200; ++iter) {
    const Eigen::VectorXd rd = H * x + g + A.transpose() * y + C.transpose() * z;
    const Eigen::VectorXd re = A * x - b;
    const Eigen::VectorXd ri = C * x + s - d;
    const double mu = mi > 0 ? s.dot(z) / mi : 0.0;
    const double res = std::max({rd.lpNorm<Eigen::Infinity>(),
                                 me ? re.lpNorm<Eigen::Infinity>() : 0.0,
                                 mi ? ri.lpNorm<Eigen::Infinity>() : 0.0});
    // round-off grows with the iterate, so the tolerance does too
    const double size =
        scale + std::max((H * x).lpNorm<Eigen::Infinity>(),
                         mi ? (C.transpose() * z).lpNorm<Eigen::Infinity>()
                            : 0.0);
    if (res <= 1e-9 * size && mu <= 1e-12 * size) {
      *x_out = x;
      return true;
    }

    const Eigen::VectorXd w = z.cwiseQuotient(s);
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + me, n + me);
    K.topLeftCorner(n, n) = H + C.transpose() * w.asDiagonal() * C;
    K.topRightCorner(n, me) = A.transpose();
    K.bottomLeftCorner(me, n) = A;
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);

    auto solve = [&](const Eigen::VectorXd &rc, Eigen::VectorXd &dx,
                     Eigen::VectorXd &dy, Eigen::VectorXd &ds,
                     Eigen::VectorXd &dz) {
      Eigen::VectorXd rhs(n + me);
      rhs.head(n) =
          -rd + C.transpose() * (rc - z.cwiseProduct(ri)).cwiseQuotient(s);
      rhs.tail(me) = -re;
      const Eigen::VectorXd sol = lu.solve(rhs);
      dx = sol.head(n);
      dy = sol.tail(me);
      ds = -ri - C * dx;
      dz = (-rc - z.cwiseProduct(ds)).cwiseQuotient(s);
    };

    Eigen::VectorXd dx, dy, ds, dz;
    solve(s.cwiseProduct(z), dx, dy, ds, dz);
    const double a_aff = std::min(max_step(s, ds), max_step(z, dz));
    const double mu_aff =
        mi > 0 ? (s + a_aff * ds).dot(z + a_aff * dz) / mi : 0.0;
    const double sigma = mu > 0 ? std::pow(mu_aff / mu, 3) : 0.0;
    const Eigen::VectorXd rc = s.cwiseProduct(z) + ds.cwiseProduct(dz) -
                               Eigen::VectorXd::Constant(mi, sigma * mu);
    solve(rc, dx, dy, ds, dz);
    const double alpha =
        std::min(1.0, 0.995 * std::min(max_step(s, ds), max_step(z, dz)));
    x += alpha * dx;
    y += alpha * dy;
    s += alpha * ds;
    z += alpha * dz;
    if (!x.allFinite()) return false;
  }
  return false;
}

}  // namespace

IpmResult InteriorPointQp(const Eigen::MatrixXd &H, const Eigen::VectorXd &g,
                          const Eigen::MatrixXd &Aeq,
                          const Eigen::VectorXd &beq,
                          const Eigen::MatrixXd &Ain,
                          const Eigen::VectorXd &bin) {
  const int n = static_cast<int>(H.rows());
  const int mi = static_cast<int>(Ain.rows());
  IpmResult out;
  Eigen::VectorXd interior;

  // phase one: min t  s.t.  Ain x - t <= bin, -t <= 1, Aeq x = beq
  {
    Eigen::MatrixXd H1 = Eigen::MatrixXd::Zero(n + 1, n + 1);
    H1.topLeftCorner(n, n) = 1e-9 * Eigen::MatrixXd::Identity(n, n);
    H1(n, n) = 1e-9;
    Eigen::VectorXd g1 = Eigen::VectorXd::Zero(n + 1);
    g1(n) = 1.0;
    Eigen::MatrixXd A1 = Eigen::MatrixXd::Zero(Aeq.rows(), n + 1);
    A1.leftCols(n) = Aeq;
    Eigen::MatrixXd C1 = Eigen::MatrixXd::Zero(mi + 1, n + 1);
    C1.topLeftCorner(mi, n) = Ain;
    C1.col(n).head(mi).setConstant(-1.0);
    C1(mi, n) = -1.0;
    Eigen::VectorXd d1(mi + 1);
    d1.head(mi) = bin;
    d1(mi) = 1.0;
    Eigen::VectorXd x1;
    if (!Ipm(H1, g1, A1, beq, C1, d1, Eigen::VectorXd::Zero(n + 1), &x1)) {
      return out;
    }
    if (x1(n) > 1e-8) return out;
    interior = x1.head(n);
  }

  // started from the most interior point of phase one
  Eigen::VectorXd x;
  if (!Ipm(H, g, Aeq, beq, Ain, bin, interior, &x)) return out;
  out.feasible = true;
  out.x = x;
  out.objective = 0.5 * x.dot(H * x) + g.dot(x);
  return out;
}

std::optional<double> EnumerateMiqp(const MpcParams &params,
                                    const DiscreteState &x0,
                                    const std::vector<DiscreteState> &reference,
                                    const TimeAwareCorridor &tac) {
  const int N = params.N;
  const int P = static_cast<int>(tac.base.size());
  const double h = params.h;
  // variables: u_0..u_{N-1} (3 each), then x_1..x_N (9 each: p, v, a)
  const int nv = 3 * N + 9 * N;
  auto U = [&](int k, int i) { return 3 * k + i; };
  auto X = [&](int k, int comp, int i) {
    return 3 * N + 9 * (k - 1) + 3 * comp + i;
  };

  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(nv, nv);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(nv);
  double constant = 0.0;
  for (int k = 0; k <= N; ++k) {
    const auto &w = k < N ? params.r_x : params.r_n;
    const DiscreteState &r = reference[k];
    for (int comp = 0; comp < 3; ++comp) {
      for (int i = 0; i < 3; ++i) {
        const double wt = w[3 * comp + i];
        const double rv = comp == 0 ? r.p[i] : comp == 1 ? r.v[i] : r.a[i];
        if (k == 0) {
          const double xv = comp == 0 ? x0.p[i] : comp == 1 ? x0.v[i] : x0.a[i];
          constant += wt * (xv - rv) * (xv - rv);
          continue;
        }
        const int col = X(k, comp, i);
        H(col, col) += 2.0 * wt;
        g(col) += -2.0 * wt * rv;
        constant += wt * rv * rv;
      }
    }
  }
  for (int k = 0; k < N; ++k) {
    for (int i = 0; i < 3; ++i) H(U(k, i), U(k, i)) += 2.0 * params.r_u[i];
  }
  H.diagonal().array() += 1e-12;

  std::vector<Eigen::RowVectorXd> eq_rows;
  std::vector<double> eq_rhs;
  auto add_eq = [&](Eigen::RowVectorXd row, double rhs) {
    eq_rows.push_back(std::move(row));
    eq_rhs.push_back(rhs);
  };
  // dynamics: x_{k+1} = f(x_k, u_k), x_0 known
  for (int k = 0; k < N; ++k) {
    for (int i = 0; i < 3; ++i) {
      const double dr = params.drag[i];
      // p
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(nv);
      row(X(k + 1, 0, i)) = 1.0;
      double rhs = 0.0;
      if (k == 0) {
        rhs = x0.p[i] + h * x0.v[i];
      } else {
        row(X(k, 0, i)) = -1.0;
        row(X(k, 1, i)) = -h;
      }
      add_eq(row, rhs);
      // v
      row.setZero();
      row(X(k + 1, 1, i)) = 1.0;
      rhs = 0.0;
      if (k == 0) {
        rhs = x0.v[i] + h * (x0.a[i] - dr * x0.v[i]);
      } else {
        row(X(k, 1, i)) = -(1.0 - h * dr);
        row(X(k, 2, i)) = -h;
      }
      add_eq(row, rhs);
      // a
      row.setZero();
      row(X(k + 1, 2, i)) = 1.0;
      row(U(k, i)) = -h;
      rhs = 0.0;
      if (k == 0) {
        rhs = x0.a[i];
      } else {
        row(X(k, 2, i)) = -1.0;
      }
      add_eq(row, rhs);
    }
  }
  for (int i = 0; i < 3; ++i) {
    for (int comp = 1; comp <= 2; ++comp) {
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(nv);
      row(X(N, comp, i)) = 1.0;
      add_eq(row, 0.0);
    }
  }

  std::vector<Eigen::RowVectorXd> in_rows;
  std::vector<double> in_rhs;
  auto add_in = [&](Eigen::RowVectorXd row, double rhs) {
    in_rows.push_back(std::move(row));
    in_rhs.push_back(rhs);
  };
  for (int k = 0; k < N; ++k) {
    for (int i = 0; i < 3; ++i) {
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(nv);
      row(U(k, i)) = 1.0;
      add_in(row, params.j_max[i]);
      add_in(-row, params.j_max[i]);
    }
  }
  for (int k = 1; k < N; ++k) {
    for (int i = 0; i < 3; ++i) {
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(nv);
      row(X(k, 2, i)) = 1.0;
      add_in(row, params.a_max[i]);
      add_in(-row, i == 2 ? -params.a_z_min : params.a_max[i]);
    }
  }
  auto point_row = [&](const Halfspace &hs, int k) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(nv);
    for (int i = 0; i < 3; ++i) row(X(k, 0, i)) = hs.normal[i];
    return row;
  };
  for (int k = 0; k < N; ++k) {
    for (const Halfspace &hs : tac.extra[k]) {
      if (k > 0) add_in(point_row(hs, k), hs.offset - params.tighten);
      add_in(point_row(hs, k + 1), hs.offset - params.tighten);
    }
  }
  const size_t fixed_rows = in_rows.size();

  Eigen::MatrixXd Aeq(eq_rows.size(), nv);
  Eigen::VectorXd beq(eq_rows.size());
  for (size_t r = 0; r < eq_rows.size(); ++r) {
    Aeq.row(r) = eq_rows[r];
    beq(r) = eq_rhs[r];
  }

  std::optional<double> best;
  const int total = N * P;
  for (int64_t mask = 0; mask < (int64_t{1} << total); ++mask) {
    bool valid = true;
    in_rows.resize(fixed_rows);
    in_rhs.resize(fixed_rows);
    for (int k = 0; k < N && valid; ++k) {
      bool any = false;
      for (int p = 0; p < P; ++p) {
        if (!((mask >> (k * P + p)) & 1)) continue;
        any = true;
        for (const Halfspace &hs : tac.base[p].halfspaces) {
          if (k == 0) {
            if (hs.Violation(x0.p) > 1e-9) valid = false;
          } else {
            add_in(point_row(hs, k), hs.offset - params.tighten);
          }
          add_in(point_row(hs, k + 1), hs.offset - params.tighten);
        }
      }
      if (!any) valid = false;
    }
    if (!valid) continue;
    Eigen::MatrixXd Ain(in_rows.size(), nv);
    Eigen::VectorXd bin(in_rows.size());
    for (size_t r = 0; r < in_rows.size(); ++r) {
      Ain.row(r) = in_rows[r];
      bin(r) = in_rhs[r];
    }
    const IpmResult res = InteriorPointQp(H, g, Aeq, beq, Ain, bin);
    if (!res.feasible) continue;
    const double obj = res.objective + constant;
    if (!best || obj < *best) best = obj;
  }
  return best;
}

}  // namespace explore::oracle
