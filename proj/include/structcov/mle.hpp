#pragma once

#include "structcov/covstruct.hpp"
#include "structcov/data.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace structcov {

/// Value of l and its gradient over the free coordinates (alpha_1..alpha_K, delta, beta).
struct Objective {
  double value = 0.0;
  Eigen::VectorXd grad;
};

/// Transformed Gaussian log-likelihood
///   l = (1/T) sum_t [ -log|R_{O_t}| - eps_{O_t}^T R_{O_t}^-1 eps_{O_t} ],
/// evaluated by grouping time points that share the same observed set. With complete data
/// this is -log|R| - tr(S_T R^-1).
class Likelihood {
 public:
  Likelihood(const CovariateSet& set, const StandardizedErrors& errors);
  /// Complete-data form from a second-moment matrix S_T.
  Likelihood(const CovariateSet& set, const Eigen::MatrixXd& S_T);

  [[nodiscard]] double value(const ParameterVector& theta) const;
  [[nodiscard]] Objective value_grad(const ParameterVector& theta) const;
  /// As value(), but returns -inf instead of throwing when R is not positive definite.
  [[nodiscard]] double value_or_neg_inf(const ParameterVector& theta) const;

  [[nodiscard]] const CovariateSet& set() const { return *set_; }
  [[nodiscard]] double T() const { return T_; }
  [[nodiscard]] double observed_count() const { return n_obs_; }

 private:
  struct Group {
    std::vector<Eigen::Index> idx;
    Eigen::MatrixXd S;  // sum of eps eps^T over the group's time points
    double n = 0.0;
  };
  const CovariateSet* set_;
  std::vector<Group> groups_;
  double T_ = 0.0;
  double n_obs_ = 0.0;

  bool accumulate(const Eigen::MatrixXd& R, double& val, Eigen::MatrixXd* W) const;
};

[[nodiscard]] double objective_l(const ParameterVector& theta, const CovariateSet& set,
                                 const Eigen::MatrixXd& S_T);
[[nodiscard]] Eigen::VectorXd gradient_l(const ParameterVector& theta, const CovariateSet& set,
                                         const Eigen::MatrixXd& S_T);
[[nodiscard]] Objective objective_l_missing(const ParameterVector& theta, const CovariateSet& set,
                                            const StandardizedErrors& errors);

inline constexpr double kCoordinateCap = 15.0;

/// log(w_k / alpha_0) for every non-identity weight, then logit(beta), each capped to +-15.
[[nodiscard]] Eigen::VectorXd reparametrize(const ParameterVector& theta);
[[nodiscard]] ParameterVector unreparametrize(const Eigen::VectorXd& x, const CovariateSet& set);

/// Gradient with respect to the unconstrained coordinates from the free-coordinate gradient.
[[nodiscard]] Eigen::VectorXd chain_rule(const ParameterVector& theta, const Eigen::VectorXd& grad);

struct FitOptions {
  double grad_tol = 1e-6;
  int max_iterations = 500;
  double c1 = 1e-4;
  double c2 = 0.9;
};

struct FitResult {
  ParameterVector theta;
  Eigen::MatrixXd R;
  double loglik_transformed = 0.0;
  double loglik_initial = 0.0;
  Eigen::MatrixXd fisher;
  bool converged = false;
  int iterations = 0;
  double grad_norm = 0.0;
  double T = 0.0;
  double observed = 0.0;  // number of observed entries
  std::vector<std::string> names;
};

/// Maximizes l with BFGS on the unconstrained coordinates, starting from theta0.
/// Never returns a point with lower likelihood than theta0.
[[nodiscard]] FitResult fit_sce(const StandardizedErrors& errors, const CovariateSet& set,
                                const ParameterVector& theta0, const FitOptions& options = {});

/// I_ij = 1/2 tr(R^-1 dR_i R^-1 dR_j) over the free coordinates.
[[nodiscard]] Eigen::MatrixXd fisher_information(const ParameterVector& theta,
                                                 const CovariateSet& set);

struct ConfidenceInterval {
  std::string name;
  double estimate = 0.0;
  double std_error = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// estimate +- z * sqrt((T I)^-1_ii). Throws EstimationError when I is singular.
[[nodiscard]] std::vector<ConfidenceInterval> confidence_intervals(const FitResult& fit,
                                                                   double level = 0.95);

[[nodiscard]] double normal_quantile(double p);

}  // namespace structcov
