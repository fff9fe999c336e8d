#pragma once

#include "structcov/covstruct.hpp"
#include "structcov/data.hpp"
#include "structcov/mle.hpp"

#include <cstdint>

namespace structcov {

struct NearestPdResult {
  Eigen::MatrixXd matrix;
  int sweeps = 0;
  bool converged = true;
};

/// Nearest unit-diagonal matrix with eigenvalues >= 1e-8, by alternating projections with
/// Dykstra's correction. Inputs that already qualify come back unchanged.
[[nodiscard]] NearestPdResult nearest_pd_correlation_ex(const Eigen::MatrixXd& M,
                                                        double tol = 1e-9, int max_sweeps = 1000);
[[nodiscard]] Eigen::MatrixXd nearest_pd_correlation(const Eigen::MatrixXd& M);

/// sum_ij (1 - R_ij^2)^2 / (T - 1), the estimated total variance of the Pearson entries.
[[nodiscard]] double estimate_pi(const Eigen::MatrixXd& R_pearson, double T);
/// Per-pair variant with overlap counts n_ij in place of T; pairs with n_ij < 2 contribute 0.
[[nodiscard]] double estimate_pi(const Eigen::MatrixXd& R_pearson, const Eigen::MatrixXd& counts);

[[nodiscard]] double estimate_gamma(const Eigen::MatrixXd& R_sce, const Eigen::MatrixXd& R_pearson);

/// sum_ij sqrt(V_ij) sqrt((1 - R_ij^2)^2 / (T - 1)) with V the entrywise SCE variances.
[[nodiscard]] double estimate_rho_upper(const Eigen::MatrixXd& sce_var,
                                        const Eigen::MatrixXd& R_pearson, double T);
[[nodiscard]] double estimate_rho_upper(const Eigen::MatrixXd& sce_var,
                                        const Eigen::MatrixXd& R_pearson,
                                        const Eigen::MatrixXd& counts);

/// Delta-method variances of the fitted entries: V_ij = J_ij^T (T I)^+ J_ij.
[[nodiscard]] Eigen::MatrixXd sce_variance(const FitResult& fit, const CovariateSet& set);

enum class ShrinkMethod { closed_form_upper, bootstrap };

[[nodiscard]] const char* to_string(ShrinkMethod m);

struct ShrinkageEstimate {
  double lambda = 0.0;
  double raw_lambda = 0.0;
  double pi_hat = 0.0;
  double rho_hat = 0.0;
  double gamma_hat = 0.0;
  ShrinkMethod method = ShrinkMethod::closed_form_upper;
  bool clamped = false;
  bool pairwise_kernel = false;  // per-pair overlap counts were used (missing data)
  int replicates = 0;
};

/// lambda = 1 - (1/T)(pi - rho)/gamma clamped to [0, 1]; gamma < 1e-12 gives lambda = 0.
/// pi and rho are on the sqrt(T) scale.
[[nodiscard]] ShrinkageEstimate lambda_closed_form(double pi, double rho, double gamma, double T);

/// Closed-form upper-bound weight from a fit and its standardized errors.
[[nodiscard]] ShrinkageEstimate shrink_closed_form(const FitResult& fit, const CovariateSet& set,
                                                   const StandardizedErrors& errors);

struct BootstrapOptions {
  int B = 100;
  std::uint64_t seed = 1;
  int max_iterations = 100;
  std::size_t threads = 1;
  StandardizeMode mode = StandardizeMode::known;
};

/// Parametric bootstrap: B samples of standardized errors from the projected Pearson
/// estimate with the original shape and mask, each refitted from theta0.
[[nodiscard]] ShrinkageEstimate lambda_bootstrap(const FitResult& fit, const ParameterVector& theta0,
                                                 const CovariateSet& set,
                                                 const StandardizedErrors& errors,
                                                 const BootstrapOptions& options);

/// (1 - lambda) R_sce + lambda R_pearson_pd.
[[nodiscard]] Eigen::MatrixXd wsce(const Eigen::MatrixXd& R_sce, const Eigen::MatrixXd& R_pearson_pd,
                                   double lambda);

}  // namespace structcov
