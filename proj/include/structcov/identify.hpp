#pragma once

#include "structcov/covstruct.hpp"

#include <Eigen/Dense>

#include <vector>

namespace structcov {

/// Two parametrizations that produce the same correlation matrix.
struct IdentifiabilityWitness {
  double beta = 0.0;
  double beta_prime = 0.0;
  ParameterVector theta;
  ParameterVector theta_prime;
  double lp_value = 0.0;
  double residual = 0.0;  // max abs entry of R(theta) - R(theta')
};

struct PairValue {
  double beta = 0.0;
  double beta_prime = 0.0;
  double lp_value = 0.0;
};

struct IdentifiabilityReport {
  bool identifiable = true;
  bool independence_ok = true;
  std::vector<double> grid;
  std::vector<double> dependent_betas;  // grid points failing the rank check
  std::vector<IdentifiabilityWitness> witnesses;
  std::vector<PairValue> pairs;  // every ordered pair, sorted by (beta, beta')
  double max_lp_value = 0.0;
  double tol = 1e-7;
};

[[nodiscard]] std::vector<double> default_beta_grid();

/// Equispaced grid with `count` points on [start, stop].
[[nodiscard]] std::vector<double> linspace_grid(double start, double stop, int count);

/// Grid scan of the linear program
///   max  sum of beta-dependent weights on both sides
///   s.t. sum a_k C_k(beta) + delta Gamma(beta)^-1 = sum a'_k C_k(beta') + delta' Gamma(beta')^-1,
///        both weight vectors on the simplex,
/// over ordered pairs beta != beta', plus a rank check of the components at each grid point.
/// Without interactions involving the spatial effect the objective is delta + delta'.
[[nodiscard]] IdentifiabilityReport check_identifiability(const CovariateSet& set,
                                                          const std::vector<double>& beta_grid,
                                                          double tol = 1e-7,
                                                          std::size_t threads = 1);

/// Rank of the vectorized upper triangles of the given matrices.
[[nodiscard]] Eigen::Index stacked_rank(const std::vector<Eigen::MatrixXd>& mats);

}  // namespace structcov
