#pragma once

#include "structcov/covstruct.hpp"
#include "structcov/data.hpp"

#include <string>
#include <vector>

namespace structcov {

/// Pairwise-complete Pearson-type estimate: (1/(n_ij - 1)) sum_t eps_ti eps_tj over times
/// where both are observed, zero for pairs with fewer than two overlaps, clipped to [-1, 1].
/// The result need not be positive definite.
[[nodiscard]] Eigen::MatrixXd pearson_type(const StandardizedErrors& errors);

/// Overlap counts n_ij.
[[nodiscard]] Eigen::MatrixXd overlap_counts(const Mask& mask);

struct LowerBound {
  std::string component;
  double bound = 0.0;
};

struct InitResult {
  ParameterVector theta0;
  double objective = 0.0;  // Frobenius distance ||R(theta0) - R_hat||
  std::vector<LowerBound> constraints_added;
  int grid_index = -1;
};

/// Least-squares fit of the model to R_hat over the beta grid:
///   min 1/2 w^T P w - h^T w,  P_ij = tr(C_i C_j), h_i = tr(C_i R_hat),
/// with w on the simplex. Weights stuck at zero get lower bounds derived from the
/// component with the nearest support and the grid is solved again until every weight is
/// at least exp(-15).
[[nodiscard]] InitResult qp_init(const Eigen::MatrixXd& R_hat, const CovariateSet& set,
                                 const std::vector<double>& beta_grid);

/// Correlation assembled from the initial parameters.
[[nodiscard]] Eigen::MatrixXd ive(const ParameterVector& theta0, const CovariateSet& set);

inline constexpr double kWeightFloor = 3.059023205018258e-07;  // exp(-15)

}  // namespace structcov
