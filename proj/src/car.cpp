#include "structcov/car.hpp"

#include "structcov/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace structcov {

SpatialGraph::SpatialGraph(Eigen::MatrixXd adjacency) : adjacency_(std::move(adjacency)) {
  if (adjacency_.rows() != adjacency_.cols())
    throw DimensionError("adjacency must be square");
  const Eigen::Index d = adjacency_.rows();
  for (Eigen::Index i = 0; i < d; ++i) {
    if (adjacency_(i, i) != 0.0)
      throw DomainError("adjacency has a self-loop at node " + std::to_string(i));
    for (Eigen::Index j = 0; j < d; ++j) {
      const double v = adjacency_(i, j);
      if (v != 0.0 && v != 1.0) throw DomainError("adjacency entries must be 0 or 1");
      if (v != adjacency_(j, i)) throw DomainError("adjacency is not symmetric");
    }
  }
}

SpatialGraph SpatialGraph::from_edges(
    Eigen::Index d, const std::vector<std::pair<Eigen::Index, Eigen::Index>>& edges) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
  for (const auto& [i, j] : edges) {
    if (i < 0 || j < 0 || i >= d || j >= d)
      throw DimensionError("edge (" + std::to_string(i) + "," + std::to_string(j) +
                           ") out of range");
    if (i == j) throw DomainError("self-loop in edge list at node " + std::to_string(i));
    m(i, j) = 1.0;
    m(j, i) = 1.0;
  }
  return SpatialGraph(std::move(m));
}

std::size_t SpatialGraph::edge_count() const {
  return static_cast<std::size_t>(adjacency_.sum() / 2.0 + 0.5);
}

SpatialGraph SpatialGraph::permuted(const std::vector<Eigen::Index>& order) const {
  const auto n = static_cast<Eigen::Index>(order.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) m(a, b) = adjacency_(order[a], order[b]);
  return SpatialGraph(std::move(m));
}

SpectralGraphCache decompose(const SpatialGraph& graph) {
  SpectralGraphCache cache;
  const Eigen::Index d = graph.size();
  cache.dimension = d;
  cache.degrees = graph.degrees();
  for (Eigen::Index i = 0; i < d; ++i) {
    if (cache.degrees(i) > 0)
      cache.nodes.push_back(i);
    else
      cache.islands.push_back(i);
  }
  const auto n = static_cast<Eigen::Index>(cache.nodes.size());
  if (n == 0) {
    cache.lambda.resize(0);
    cache.U.resize(0, 0);
    cache.U_inv.resize(0, 0);
    return cache;
  }

  Eigen::VectorXd inv_sqrt(n), sqrt_deg(n);
  for (Eigen::Index a = 0; a < n; ++a) {
    sqrt_deg(a) = std::sqrt(cache.degrees(cache.nodes[a]));
    inv_sqrt(a) = 1.0 / sqrt_deg(a);
  }
  Eigen::MatrixXd S(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      S(a, b) = graph.adjacency()(cache.nodes[a], cache.nodes[b]) * inv_sqrt(a) * inv_sqrt(b);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);
  if (eig.info() != Eigen::Success) throw SolverError("eigendecomposition of adjacency failed");
  // Rounding can push the Perron eigenvalue of a component slightly past 1.
  cache.lambda = eig.eigenvalues().cwiseMax(-1.0).cwiseMin(1.0);
  const Eigen::MatrixXd& V = eig.eigenvectors();
  cache.U = inv_sqrt.asDiagonal() * V;
  cache.U_inv = V.transpose() * sqrt_deg.asDiagonal();
  return cache;
}

namespace {

void check_beta(double beta) {
  if (!(beta > 0.0 && beta < 1.0))
    throw DomainError("beta must lie strictly inside (0, 1), got " + std::to_string(beta));
}

Eigen::MatrixXd scatter(const SpectralGraphCache& cache, const Eigen::MatrixXd& sub,
                        double island_diag) {
  const Eigen::Index d = cache.dimension;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, d);
  const auto n = static_cast<Eigen::Index>(cache.nodes.size());
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) out(cache.nodes[a], cache.nodes[b]) = sub(a, b);
  for (Eigen::Index i : cache.islands) out(i, i) = island_diag;
  return out;
}

}  // namespace

CarEvaluation car_evaluate(const SpectralGraphCache& cache, double beta, int order) {
  check_beta(beta);
  beta = std::clamp(beta, 1e-10, 1.0 - 1e-10);
  const auto n = static_cast<Eigen::Index>(cache.nodes.size());
  CarEvaluation out;
  const Eigen::Index d = cache.dimension;
  if (n == 0) {
    out.value = Eigen::MatrixXd::Identity(d, d);
    if (order >= 1) out.grad = Eigen::MatrixXd::Zero(d, d);
    if (order >= 2) out.hess = Eigen::MatrixXd::Zero(d, d);
    return out;
  }

  const Eigen::ArrayXd lam = cache.lambda.array();
  const Eigen::ArrayXd q = 1.0 - beta * lam;
  const Eigen::ArrayXd g0 = q.inverse();
  const Eigen::MatrixXd& U = cache.U;

  // A = (M2 - beta M)^-1 on the non-island block, with derivatives in beta.
  const Eigen::MatrixXd A = U * g0.matrix().asDiagonal() * U.transpose();
  const Eigen::ArrayXd s = A.diagonal().array().rsqrt();
  Eigen::MatrixXd G = s.matrix().asDiagonal() * A * s.matrix().asDiagonal();
  G.diagonal().setOnes();
  out.value = scatter(cache, G, 1.0);
  if (order < 1) return out;

  const Eigen::ArrayXd g1 = lam * g0.square();
  const Eigen::MatrixXd A1 = U * g1.matrix().asDiagonal() * U.transpose();
  const Eigen::ArrayXd a1 = A1.diagonal().array();
  const Eigen::ArrayXd s1 = -0.5 * s.cube() * a1;
  Eigen::MatrixXd G1(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      G1(i, j) = (s1(i) * s(j) + s(i) * s1(j)) * A(i, j) + s(i) * s(j) * A1(i, j);
  G1.diagonal().setZero();
  out.grad = scatter(cache, G1, 0.0);
  if (order < 2) return out;

  const Eigen::ArrayXd g2 = 2.0 * lam.square() * g0.cube();
  const Eigen::MatrixXd A2 = U * g2.matrix().asDiagonal() * U.transpose();
  const Eigen::ArrayXd a2 = A2.diagonal().array();
  const Eigen::ArrayXd s2 = 0.75 * s.pow(5) * a1.square() - 0.5 * s.cube() * a2;
  Eigen::MatrixXd G2(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      G2(i, j) = (s2(i) * s(j) + s(i) * s2(j) + 2.0 * s1(i) * s1(j)) * A(i, j) +
                 2.0 * (s1(i) * s(j) + s(i) * s1(j)) * A1(i, j) + s(i) * s(j) * A2(i, j);
  G2.diagonal().setZero();
  out.hess = scatter(cache, G2, 0.0);
  return out;
}

Eigen::MatrixXd car_correlation(const SpectralGraphCache& cache, double beta) {
  return car_evaluate(cache, beta, 0).value;
}

Eigen::MatrixXd car_correlation_grad(const SpectralGraphCache& cache, double beta) {
  return car_evaluate(cache, beta, 1).grad;
}

Eigen::MatrixXd car_correlation_hess(const SpectralGraphCache& cache, double beta) {
  return car_evaluate(cache, beta, 2).hess;
}

}  // namespace structcov
