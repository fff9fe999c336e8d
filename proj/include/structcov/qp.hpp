#pragma once

#include <Eigen/Dense>

namespace structcov {

struct QpResult {
  Eigen::VectorXd x;
  double value = 0.0;  // 1/2 x^T G x + a^T x
  Eigen::VectorXi active;
  int iterations = 0;
};

/// minimize 1/2 x^T G x + a^T x
/// subject to CE^T x = ce and CI^T x >= ci (constraints are columns).
///
/// Dual active-set method of Goldfarb and Idnani. G must be positive definite. The
/// factorizations are rebuilt whenever the active set changes, which is cheap for the
/// handful of variables this library needs and avoids update bookkeeping.
/// Throws SolverError on infeasibility or a non-PD G.
[[nodiscard]] QpResult solve_qp(const Eigen::MatrixXd& G, const Eigen::VectorXd& a,
                                const Eigen::MatrixXd& CE, const Eigen::VectorXd& ce,
                                const Eigen::MatrixXd& CI, const Eigen::VectorXd& ci,
                                int max_iterations = 1000);

}  // namespace structcov
