#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Deliberately naive: direct inversion, plain loops, finite differences.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

// Diag-normalized (M2 - beta M)^-1 via dense inversion; islands get identity rows.
inline Eigen::MatrixXd car_dense(const Eigen::MatrixXd& M, double beta) {
  const Eigen::Index d = M.rows();
  Eigen::VectorXd deg = M.rowwise().sum();
  std::vector<Eigen::Index> nodes;
  for (Eigen::Index i = 0; i < d; ++i)
    if (deg(i) > 0) nodes.push_back(i);
  const auto n = static_cast<Eigen::Index>(nodes.size());
  Eigen::MatrixXd M1(n, n), M2inv = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    M2inv(a, a) = 1.0 / deg(nodes[a]);
    for (Eigen::Index b = 0; b < n; ++b) M1(a, b) = M(nodes[a], nodes[b]) / deg(nodes[a]);
  }
  Eigen::MatrixXd A = (Eigen::MatrixXd::Identity(n, n) - beta * M1).inverse() * M2inv;
  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(d, d);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      out(nodes[a], nodes[b]) = A(a, b) / std::sqrt(A(a, a) * A(b, b));
  return out;
}

inline Eigen::MatrixXd random_graph(Eigen::Index d, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i + 1; j < d; ++j)
      if (coin(rng)) M(i, j) = M(j, i) = 1.0;
  return M;
}

inline std::vector<int> random_labels(Eigen::Index d, int m, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, m - 1);
  std::vector<int> out(static_cast<std::size_t>(d));
  for (auto& l : out) l = pick(rng);
  return out;
}

// Point on the open simplex with every coordinate at least `floor`.
inline Eigen::VectorXd random_simplex(Eigen::Index n, std::mt19937_64& rng, double floor = 0.01) {
  std::exponential_distribution<double> e(1.0);
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) w(i) = e(rng);
  w /= w.sum();
  w = (w.array() * (1.0 - n * floor) + floor).matrix();
  return w;
}

inline double central_diff(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline Eigen::MatrixXd central_diff_matrix(const std::function<Eigen::MatrixXd(double)>& f,
                                           double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline Eigen::MatrixXd second_diff_matrix(const std::function<Eigen::MatrixXd(double)>& f,
                                          double x, double h) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

inline double rel_err(double a, double b, double floor = 1e-6) {
  return std::abs(a - b) / std::max(floor, std::max(std::abs(a), std::abs(b)));
}

// Textbook correlation of the columns of X (centered, n-1 normalization).
inline Eigen::MatrixXd sample_correlation(const Eigen::MatrixXd& X) {
  const Eigen::Index T = X.rows(), d = X.cols();
  Eigen::MatrixXd R(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      double mi = 0, mj = 0;
      for (Eigen::Index t = 0; t < T; ++t) {
        mi += X(t, i);
        mj += X(t, j);
      }
      mi /= T;
      mj /= T;
      double sij = 0, sii = 0, sjj = 0;
      for (Eigen::Index t = 0; t < T; ++t) {
        sij += (X(t, i) - mi) * (X(t, j) - mj);
        sii += (X(t, i) - mi) * (X(t, i) - mi);
        sjj += (X(t, j) - mj) * (X(t, j) - mj);
      }
      R(i, j) = sij / std::sqrt(sii * sjj);
    }
  return R;
}

}  // namespace oracle

namespace oracle {

// max c^T x s.t. A x = b, x >= 0 by enumerating every column subset with full column rank.
// Only for tiny n. Returns -inf when infeasible.
inline double lp_enumerate(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                           const Eigen::VectorXd& c) {
  const Eigen::Index n = A.cols();
  double best = -std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index j = 0; j < n; ++j)
      if (mask & (1u << j)) cols.push_back(j);
    Eigen::MatrixXd As(A.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) As.col(static_cast<Eigen::Index>(k)) = A.col(cols[k]);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(As);
    qr.setThreshold(1e-10);
    if (qr.rank() != As.cols()) continue;
    Eigen::VectorXd xs = qr.solve(b);
    if ((As * xs - b).cwiseAbs().maxCoeff() > 1e-9) continue;
    if (xs.minCoeff() < -1e-12) continue;
    double v = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k) v += c(cols[k]) * xs(static_cast<Eigen::Index>(k));
    best = std::max(best, v);
  }
  return best;
}

}  // namespace oracle

namespace oracle {

// Convex QP min 1/2 x'Gx + a'x, CE'x = ce, CI'x >= ci by trying every active set and
// keeping the feasible KKT point with the lowest objective.
inline Eigen::VectorXd qp_enumerate(const Eigen::MatrixXd& G, const Eigen::VectorXd& a,
                                    const Eigen::MatrixXd& CE, const Eigen::VectorXd& ce,
                                    const Eigen::MatrixXd& CI, const Eigen::VectorXd& ci) {
  const Eigen::Index n = G.rows(), me = CE.cols(), mi = CI.cols();
  Eigen::VectorXd best;
  double best_v = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << mi); ++mask) {
    std::vector<Eigen::Index> act;
    for (Eigen::Index j = 0; j < mi; ++j)
      if (mask & (1u << j)) act.push_back(j);
    const Eigen::Index m = me + static_cast<Eigen::Index>(act.size());
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + m, n + m);
    Eigen::VectorXd rhs(n + m);
    K.topLeftCorner(n, n) = G;
    rhs.head(n) = -a;
    for (Eigen::Index e = 0; e < me; ++e) {
      K.block(0, n + e, n, 1) = -CE.col(e);
      K.block(n + e, 0, 1, n) = CE.col(e).transpose();
      rhs(n + e) = ce(e);
    }
    for (std::size_t k = 0; k < act.size(); ++k) {
      const Eigen::Index r = n + me + static_cast<Eigen::Index>(k);
      K.block(0, r, n, 1) = -CI.col(act[k]);
      K.block(r, 0, 1, n) = CI.col(act[k]).transpose();
      rhs(r) = ci(act[k]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
    if (lu.rank() < n + m) continue;
    Eigen::VectorXd sol = lu.solve(rhs);
    Eigen::VectorXd x = sol.head(n);
    bool ok = true;
    for (Eigen::Index j = 0; j < mi; ++j)
      if (CI.col(j).dot(x) < ci(j) - 1e-9) ok = false;
    for (std::size_t k = 0; k < act.size(); ++k)
      if (sol(n + me + static_cast<Eigen::Index>(k)) < -1e-9) ok = false;
    if (!ok) continue;
    const double v = 0.5 * x.dot(G * x) + a.dot(x);
    if (v < best_v) {
      best_v = v;
      best = x;
    }
  }
  return best;
}

}  // namespace oracle
