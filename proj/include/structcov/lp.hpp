#pragma once

#include <Eigen/Dense>

namespace structcov {

struct LpResult {
  enum class Status { optimal, infeasible, unbounded, iteration_limit };
  Status status = Status::iteration_limit;
  double value = 0.0;
  Eigen::VectorXd x;
  int iterations = 0;
};

/// maximize c^T x subject to A x = b, x >= 0.
///
/// Dense two-phase tableau simplex with Bland's rule. Meant for the small problems that
/// come out of the identifiability check; not tuned for large sparse programs.
[[nodiscard]] LpResult simplex_maximize(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                        const Eigen::VectorXd& c, int max_iterations = 20000);

/// Orthonormal-ish basis of the row space of A (rows scaled by singular values), after
/// dropping exact duplicate rows. {x : A x = 0} equals {x : B x = 0} for the result B.
[[nodiscard]] Eigen::MatrixXd compress_rows(const Eigen::MatrixXd& A, double rel_tol = 1e-10);

}  // namespace structcov
