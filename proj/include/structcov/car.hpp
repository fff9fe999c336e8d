#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace structcov {

/// Undirected, unweighted spatial graph stored as a dense 0/1 adjacency.
class SpatialGraph {
 public:
  /// Validates symmetry, zero diagonal and 0/1 entries.
  explicit SpatialGraph(Eigen::MatrixXd adjacency);

  static SpatialGraph from_edges(Eigen::Index d,
                                 const std::vector<std::pair<Eigen::Index, Eigen::Index>>& edges);

  [[nodiscard]] Eigen::Index size() const { return adjacency_.rows(); }
  [[nodiscard]] const Eigen::MatrixXd& adjacency() const { return adjacency_; }
  [[nodiscard]] Eigen::VectorXd degrees() const { return adjacency_.rowwise().sum(); }
  [[nodiscard]] std::size_t edge_count() const;

  /// Graph on the selected nodes, in the given order.
  [[nodiscard]] SpatialGraph permuted(const std::vector<Eigen::Index>& order) const;

 private:
  Eigen::MatrixXd adjacency_;
};

/// One-time spectral decomposition of the row-normalized adjacency M1 = D^-1 M,
/// restricted to nodes with at least one neighbor.
///
/// M1 is diagonalized through the similar symmetric matrix D^-1/2 M D^-1/2 = V diag(lambda) V^T,
/// so U = D^-1/2 V and U_inv = V^T D^1/2. Then
///   (I - beta M1)^-1 M2^-1 = U diag(1 / (1 - beta lambda)) U^T,
/// which is symmetric and only needs a rescaling of the diagonal to become a correlation matrix.
struct SpectralGraphCache {
  Eigen::Index dimension = 0;
  std::vector<Eigen::Index> nodes;    // non-island node indices, in increasing order
  std::vector<Eigen::Index> islands;  // zero-degree node indices
  Eigen::VectorXd degrees;            // neighbor counts for all d nodes
  Eigen::VectorXd lambda;             // eigenvalues of M1 on `nodes`
  Eigen::MatrixXd U;                  // eigenvectors of M1 (columns)
  Eigen::MatrixXd U_inv;
};

[[nodiscard]] SpectralGraphCache decompose(const SpatialGraph& graph);

/// Normalized CAR correlation and its beta-derivatives.
struct CarEvaluation {
  Eigen::MatrixXd value;
  Eigen::MatrixXd grad;  // empty unless order >= 1
  Eigen::MatrixXd hess;  // empty unless order >= 2
};

/// Evaluates Gamma(beta)^-1 and, depending on `order` (0, 1 or 2), its first and second
/// derivatives in beta. Islands get identity rows. Throws DomainError unless 0 < beta < 1.
[[nodiscard]] CarEvaluation car_evaluate(const SpectralGraphCache& cache, double beta, int order);

[[nodiscard]] Eigen::MatrixXd car_correlation(const SpectralGraphCache& cache, double beta);
[[nodiscard]] Eigen::MatrixXd car_correlation_grad(const SpectralGraphCache& cache, double beta);
[[nodiscard]] Eigen::MatrixXd car_correlation_hess(const SpectralGraphCache& cache, double beta);

}  // namespace structcov
