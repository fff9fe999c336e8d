#include "structcov/data.hpp"

#include "structcov/error.hpp"

#include <cmath>
#include <string>

namespace structcov {

StandardizedErrors StandardizedErrors::from_complete(Eigen::MatrixXd values) {
  StandardizedErrors e;
  e.mask = Mask::Constant(values.rows(), values.cols(), true);
  e.values = std::move(values);
  return e;
}

Dataset Dataset::complete(Eigen::MatrixXd y) {
  Dataset d;
  d.mask = Mask::Constant(y.rows(), y.cols(), true);
  d.y = std::move(y);
  return d;
}

void validate_dataset(const Dataset& data, StandardizeMode mode) {
  const Eigen::Index T = data.T(), d = data.d();
  if (data.mask.rows() != T || data.mask.cols() != d)
    throw DimensionError("mask shape differs from the data");
  if (mode == StandardizeMode::known) {
    if (!data.mu || !data.sigma) throw InputError("known mode needs both mu and sigma");
    if (data.mu->rows() != T || data.mu->cols() != d || data.sigma->rows() != T ||
        data.sigma->cols() != d)
      throw DimensionError("mu/sigma shape differs from the data");
  }
  for (Eigen::Index t = 0; t < T; ++t)
    for (Eigen::Index i = 0; i < d; ++i) {
      if (!data.mask(t, i)) continue;
      if (!std::isfinite(data.y(t, i)))
        throw InputError("non-finite observation at row " + std::to_string(t) + ", column " +
                         std::to_string(i));
      if (mode == StandardizeMode::known && !((*data.sigma)(t, i) > 0.0))
        throw DomainError("sigma must be positive where data are observed");
    }
}

StandardizedErrors standardize(const Dataset& data, StandardizeMode mode) {
  validate_dataset(data, mode);
  const Eigen::Index T = data.T(), d = data.d();
  StandardizedErrors e;
  e.mask = data.mask;
  e.values = Eigen::MatrixXd::Zero(T, d);
  if (mode == StandardizeMode::known) {
    for (Eigen::Index t = 0; t < T; ++t)
      for (Eigen::Index i = 0; i < d; ++i)
        if (data.mask(t, i)) e.values(t, i) = (data.y(t, i) - (*data.mu)(t, i)) / (*data.sigma)(t, i);
    return e;
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    double n = 0, sum = 0;
    for (Eigen::Index t = 0; t < T; ++t)
      if (data.mask(t, i)) {
        n += 1;
        sum += data.y(t, i);
      }
    if (n < 2) {
      // Nothing to standardize against; the variable carries no correlation information.
      for (Eigen::Index t = 0; t < T; ++t) e.mask(t, i) = false;
      continue;
    }
    const double mean = sum / n;
    double ss = 0;
    for (Eigen::Index t = 0; t < T; ++t)
      if (data.mask(t, i)) ss += (data.y(t, i) - mean) * (data.y(t, i) - mean);
    const double sd = std::sqrt(ss / (n - 1));
    if (!(sd > 0.0)) throw EstimationError("variable " + std::to_string(i) + " has zero variance");
    for (Eigen::Index t = 0; t < T; ++t)
      if (data.mask(t, i)) e.values(t, i) = (data.y(t, i) - mean) / sd;
  }
  return e;
}

Eigen::MatrixXd second_moment(const StandardizedErrors& e) {
  if (e.T() == 0) throw EstimationError("no observations");
  return e.values.transpose() * e.values / static_cast<double>(e.T());
}

}  // namespace structcov
