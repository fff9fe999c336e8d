#pragma once

#include <Eigen/Dense>

#include <functional>

namespace structcov {

struct BfgsOptions {
  double grad_tol = 1e-6;
  int max_iterations = 500;
  double c1 = 1e-4;
  double c2 = 0.9;
  double lower = -15.0;
  double upper = 15.0;
};

struct BfgsResult {
  Eigen::VectorXd x;
  double f = 0.0;
  Eigen::VectorXd g;
  double pg_norm = 0.0;  // infinity norm of the projected gradient
  int iterations = 0;
  bool converged = false;
};

/// f(x, grad) returns the value and fills grad. Infinite values mark infeasible points.
using ValueGrad = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

/// Box-constrained BFGS minimization. Coordinates at a bound whose gradient pushes outward
/// are frozen for the step; the rest follow the quasi-Newton direction with a strong Wolfe
/// line search truncated at the box.
[[nodiscard]] BfgsResult minimize_bfgs(const ValueGrad& fg, Eigen::VectorXd x0,
                                       const BfgsOptions& opt = {});

}  // namespace structcov
