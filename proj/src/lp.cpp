#include "structcov/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

namespace structcov {

namespace {

constexpr double kPivotTol = 1e-11;

struct Tableau {
  // Constraint rows [A | b]; the last row holds reduced costs and -objective.
  Eigen::MatrixXd T;
  std::vector<Eigen::Index> basis;

  [[nodiscard]] Eigen::Index rows() const { return T.rows() - 1; }
  [[nodiscard]] Eigen::Index cols() const { return T.cols() - 1; }

  void pivot(Eigen::Index r, Eigen::Index c) {
    T.row(r) /= T(r, c);
    for (Eigen::Index i = 0; i < T.rows(); ++i) {
      if (i == r) continue;
      const double f = T(i, c);
      if (f != 0.0) T.row(i) -= f * T.row(r);
    }
    basis[static_cast<std::size_t>(r)] = c;
  }

  void set_objective(const Eigen::VectorXd& cost) {
    T.row(rows()).setZero();
    T.row(rows()).head(cost.size()) = cost.transpose();
    for (Eigen::Index i = 0; i < rows(); ++i) {
      const double cb = cost(basis[static_cast<std::size_t>(i)]);
      if (cb != 0.0) T.row(rows()) -= cb * T.row(i);
    }
  }

  // Returns optimal, unbounded or iteration_limit. Columns >= `usable` never enter.
  LpResult::Status run(Eigen::Index usable, int max_iterations, int& iterations) {
    const Eigen::Index m = rows();
    while (iterations < max_iterations) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < usable; ++j)
        if (T(m, j) > 1e-10) {
          enter = j;
          break;
        }
      if (enter < 0) return LpResult::Status::optimal;
      Eigen::Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < m; ++i) {
        const double a = T(i, enter);
        if (a <= kPivotTol) continue;
        const double ratio = T(i, cols()) / a;
        const bool tie = leave >= 0 && ratio <= best + 1e-12 &&
                         basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)];
        if (leave < 0 || ratio < best - 1e-12 || tie) {
          best = std::min(best, ratio);
          leave = i;
        }
      }
      if (leave < 0) return LpResult::Status::unbounded;
      pivot(leave, enter);
      ++iterations;
    }
    return LpResult::Status::iteration_limit;
  }
};

}  // namespace

LpResult simplex_maximize(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                          const Eigen::VectorXd& c, int max_iterations) {
  const Eigen::Index m = A.rows(), n = A.cols();
  LpResult res;
  Tableau tab;
  tab.T = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double s = b(i) < 0.0 ? -1.0 : 1.0;
    tab.T.row(i).head(n) = s * A.row(i);
    tab.T(i, n + i) = 1.0;
    tab.T(i, n + m) = s * b(i);
    tab.basis.push_back(n + i);
  }

  // Phase 1: maximize minus the sum of artificials.
  Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(n + m);
  phase1.tail(m).setConstant(-1.0);
  tab.set_objective(phase1);
  auto st = tab.run(n + m, max_iterations, res.iterations);
  if (st == LpResult::Status::iteration_limit) {
    res.status = st;
    return res;
  }
  const double infeas = tab.T(m, n + m);  // equals the sum of artificials at optimum
  const double scale = 1.0 + b.cwiseAbs().maxCoeff();
  if (std::abs(infeas) > 1e-9 * scale) {
    res.status = LpResult::Status::infeasible;
    return res;
  }

  // Drive artificials out of the basis; rows that cannot pivot are redundant.
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (tab.basis[static_cast<std::size_t>(i)] < n) {
      keep.push_back(i);
      continue;
    }
    Eigen::Index col = -1;
    double big = kPivotTol * 100;
    for (Eigen::Index j = 0; j < n; ++j)
      if (std::abs(tab.T(i, j)) > big) {
        big = std::abs(tab.T(i, j));
        col = j;
      }
    if (col >= 0) {
      tab.pivot(i, col);
      keep.push_back(i);
    }
  }
  if (static_cast<Eigen::Index>(keep.size()) < m) {
    Tableau reduced;
    reduced.T.resize(static_cast<Eigen::Index>(keep.size()) + 1, tab.T.cols());
    for (std::size_t r = 0; r < keep.size(); ++r) {
      reduced.T.row(static_cast<Eigen::Index>(r)) = tab.T.row(keep[r]);
      reduced.basis.push_back(tab.basis[static_cast<std::size_t>(keep[r])]);
    }
    reduced.T.row(reduced.T.rows() - 1).setZero();
    tab = std::move(reduced);
  }

  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(n + m);
  phase2.head(n) = c;
  tab.set_objective(phase2);
  st = tab.run(n, max_iterations, res.iterations);
  res.status = st;
  if (st != LpResult::Status::optimal) return res;

  res.x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < tab.rows(); ++i) {
    const Eigen::Index j = tab.basis[static_cast<std::size_t>(i)];
    if (j < n) res.x(j) = std::max(0.0, tab.T(i, tab.cols()));
  }
  res.value = c.dot(res.x);
  return res;
}

Eigen::MatrixXd compress_rows(const Eigen::MatrixXd& A, double rel_tol) {
  const Eigen::Index n = A.cols();
  // Exact duplicates are common (cluster blocks repeat the same row many times).
  std::map<std::vector<double>, Eigen::Index> seen;
  std::vector<Eigen::Index> unique;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    std::vector<double> key(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) key[static_cast<std::size_t>(j)] = A(i, j);
    if (A.row(i).cwiseAbs().maxCoeff() == 0.0) continue;
    if (seen.emplace(std::move(key), i).second) unique.push_back(i);
  }
  if (unique.empty()) return Eigen::MatrixXd(0, n);
  Eigen::MatrixXd U(static_cast<Eigen::Index>(unique.size()), n);
  for (std::size_t r = 0; r < unique.size(); ++r) U.row(static_cast<Eigen::Index>(r)) = A.row(unique[r]);

  Eigen::MatrixXd R;
  if (U.rows() > n) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(U);
    R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  } else {
    R = U;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(R, Eigen::ComputeFullV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cut = rel_tol * std::max(1.0, s.size() ? s(0) : 0.0);
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > cut) ++r;
  Eigen::MatrixXd out(r, n);
  for (Eigen::Index i = 0; i < r; ++i) out.row(i) = s(i) * svd.matrixV().col(i).transpose();
  return out;
}

}  // namespace structcov
