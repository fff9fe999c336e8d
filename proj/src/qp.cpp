#include "structcov/qp.hpp"

#include "structcov/error.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace structcov {

namespace {

struct Active {
  Eigen::Index index;  // column in CE (equality) or CI (inequality)
  bool equality;
  Eigen::VectorXd normal;
  double rhs;
};

struct Directions {
  Eigen::VectorXd z;  // primal step direction
  Eigen::VectorXd r;  // change of active multipliers per unit step
};

Directions directions(const Eigen::MatrixXd& Linv, const std::vector<Active>& act,
                      const Eigen::VectorXd& np) {
  const Eigen::Index n = Linv.rows();
  const auto q = static_cast<Eigen::Index>(act.size());
  Directions out;
  if (q == 0) {
    // J = L^-T
    out.z = Linv.transpose() * (Linv * np);
    out.r.resize(0);
    return out;
  }
  Eigen::MatrixXd N(n, q);
  for (Eigen::Index j = 0; j < q; ++j) N.col(j) = act[static_cast<std::size_t>(j)].normal;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Linv * N);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd R = qr.matrixQR().topRows(q).triangularView<Eigen::Upper>();
  Eigen::MatrixXd J = Linv.transpose() * Q;
  Eigen::VectorXd d = J.transpose() * np;
  out.z = J.rightCols(n - q) * d.tail(n - q);
  out.r = R.triangularView<Eigen::Upper>().solve(d.head(q));
  return out;
}

}  // namespace

QpResult solve_qp(const Eigen::MatrixXd& G, const Eigen::VectorXd& a, const Eigen::MatrixXd& CE,
                  const Eigen::VectorXd& ce, const Eigen::MatrixXd& CI, const Eigen::VectorXd& ci,
                  int max_iterations) {
  const Eigen::Index n = G.rows();
  if (G.cols() != n || a.size() != n || (CE.cols() > 0 && CE.rows() != n) ||
      (CI.cols() > 0 && CI.rows() != n) || CE.cols() != ce.size() || CI.cols() != ci.size())
    throw DimensionError("quadratic program dimensions do not agree");

  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success) throw SolverError("QP matrix is not positive definite");
  const Eigen::MatrixXd L = llt.matrixL();
  const Eigen::MatrixXd Linv = L.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(n, n));

  QpResult res;
  Eigen::VectorXd x = -llt.solve(a);
  std::vector<Active> act;
  std::vector<double> u;
  const double inf = std::numeric_limits<double>::infinity();
  const double scale = 1.0 + a.cwiseAbs().maxCoeff() + G.cwiseAbs().maxCoeff();
  const double feas_tol = 1e-12 * scale;

  // Add constraint p (already oriented so that we need normal^T x >= rhs to increase).
  auto add = [&](Active p) {
    u.push_back(0.0);
    for (;;) {
      if (++res.iterations > max_iterations) throw SolverError("QP iteration limit reached");
      Directions dir = directions(Linv, act, p.normal);
      double t1 = inf;
      Eigen::Index drop = -1;
      for (std::size_t j = 0; j < act.size(); ++j) {
        if (act[j].equality) continue;
        const double rj = dir.r(static_cast<Eigen::Index>(j));
        if (rj > 0.0) {
          const double tj = u[j] / rj;
          if (tj < t1) {
            t1 = tj;
            drop = static_cast<Eigen::Index>(j);
          }
        }
      }
      const double zn = dir.z.dot(p.normal);
      const double slack = p.normal.dot(x) - p.rhs;
      const bool has_primal = dir.z.norm() > 1e-14 * (1.0 + p.normal.norm()) && zn > 0.0;
      const double t2 = has_primal ? -slack / zn : inf;
      const double t = std::min(t1, t2);
      if (t == inf) throw SolverError("quadratic program is infeasible");
      for (std::size_t j = 0; j < act.size(); ++j) u[j] -= t * dir.r(static_cast<Eigen::Index>(j));
      u.back() += t;
      if (has_primal) x += t * dir.z;
      if (has_primal && t2 <= t1) {
        act.push_back(std::move(p));
        return;
      }
      act.erase(act.begin() + drop);
      u.erase(u.begin() + drop);
    }
  };

  for (Eigen::Index e = 0; e < CE.cols(); ++e) {
    Active p{e, true, CE.col(e), ce(e)};
    if (p.normal.dot(x) - p.rhs > 0.0) {
      p.normal = -p.normal;
      p.rhs = -p.rhs;
    }
    if (std::abs(p.normal.dot(x) - p.rhs) <= feas_tol) {
      // Already satisfied; still record it so later steps keep it.
      Directions dir = directions(Linv, act, p.normal);
      if (dir.z.norm() < 1e-14 * (1.0 + p.normal.norm()))
        throw SolverError("equality constraints are linearly dependent");
    }
    add(std::move(p));
  }

  for (;;) {
    Eigen::Index worst = -1;
    double worst_s = -feas_tol;
    for (Eigen::Index i = 0; i < CI.cols(); ++i) {
      bool in = false;
      for (const auto& c : act)
        if (!c.equality && c.index == i) in = true;
      if (in) continue;
      const double s = CI.col(i).dot(x) - ci(i);
      if (s < worst_s) {
        worst_s = s;
        worst = i;
      }
    }
    if (worst < 0) break;
    add(Active{worst, false, CI.col(worst), ci(worst)});
  }

  res.x = x;
  res.value = 0.5 * x.dot(G * x) + a.dot(x);
  std::vector<int> idx;
  for (const auto& c : act)
    if (!c.equality) idx.push_back(static_cast<int>(c.index));
  res.active = Eigen::Map<Eigen::VectorXi>(idx.data(), static_cast<Eigen::Index>(idx.size()));
  return res;
}

}  // namespace structcov
