#pragma once

#include <Eigen/Dense>

#include <optional>

namespace structcov {

using Mask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// eps_t = diag(sigma_t)^-1 (y_t - mu_t). Entries where mask is false are zero and ignored.
struct StandardizedErrors {
  Eigen::MatrixXd values;
  Mask mask;

  [[nodiscard]] Eigen::Index T() const { return values.rows(); }
  [[nodiscard]] Eigen::Index d() const { return values.cols(); }
  [[nodiscard]] bool complete() const { return mask.all(); }

  static StandardizedErrors from_complete(Eigen::MatrixXd values);
};

/// T x d observations with optional mask and known per-time means and scales.
struct Dataset {
  Eigen::MatrixXd y;
  Mask mask;
  std::optional<Eigen::MatrixXd> mu;
  std::optional<Eigen::MatrixXd> sigma;

  [[nodiscard]] Eigen::Index T() const { return y.rows(); }
  [[nodiscard]] Eigen::Index d() const { return y.cols(); }

  static Dataset complete(Eigen::MatrixXd y);
};

enum class StandardizeMode { known, unknown };

/// Known mode uses the supplied mu and sigma. Unknown mode plugs in the per-variable
/// empirical mean and standard deviation (n - 1 denominator) over observed entries.
[[nodiscard]] StandardizedErrors standardize(const Dataset& data, StandardizeMode mode);

void validate_dataset(const Dataset& data, StandardizeMode mode);

/// (1/T) sum_t eps_t eps_t^T for complete data.
[[nodiscard]] Eigen::MatrixXd second_moment(const StandardizedErrors& e);

}  // namespace structcov
