#include "doctest.h"
#include "oracles.hpp"

#include "structcov/covstruct.hpp"
#include "structcov/error.hpp"

using namespace structcov;

namespace {

double min_eig(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

SpatialGraph path3() { return SpatialGraph::from_edges(3, {{0, 1}, {1, 2}}); }

}  // namespace

TEST_CASE("cluster matrices") {
  auto a = build_cluster_matrix({0, 0, 1});
  Eigen::Matrix3d expect;
  expect << 1, 1, 0, 1, 1, 0, 0, 0, 1;
  CHECK(a.matrix == expect);
  CHECK(build_cluster_matrix({0, 1, 2}).matrix == Eigen::MatrixXd::Identity(3, 3));
  auto ones = build_cluster_matrix({0, 0, 0, 0});
  CHECK(ones.matrix == Eigen::MatrixXd::Ones(4, 4));
  CHECK(min_eig(ones.matrix) >= -1e-8);
  CHECK_THROWS_AS((void)build_cluster_matrix({}), DimensionError);
  CHECK_THROWS_AS((void)build_cluster_matrix({0, -1}), DomainError);
}

TEST_CASE("cluster matrix is f f^T") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    auto labels = oracle::random_labels(12, 4, rng);
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(12, 4);
    for (int i = 0; i < 12; ++i) f(i, labels[static_cast<std::size_t>(i)]) = 1.0;
    CHECK(build_cluster_matrix(labels).matrix == f * f.transpose());
  }
}

TEST_CASE("global matrix") {
  CHECK(build_global_matrix(2).matrix == Eigen::MatrixXd::Ones(2, 2));
  auto g = build_global_matrix(195);
  CHECK(g.matrix.fullPivLu().rank() == 1);
  CHECK_THROWS_AS((void)build_global_matrix(1), DimensionError);
}

TEST_CASE("hadamard interactions") {
  auto A = build_global_matrix(2, "A");
  auto B = build_cluster_matrix({0, 1}, "B");
  CHECK(hadamard_interaction(A, B).matrix == Eigen::MatrixXd::Identity(2, 2));
  auto F = build_cluster_matrix({0, 1, 0, 2, 1}, "F");
  CHECK(hadamard_interaction(F, F, "FF").matrix == F.matrix);
  auto ab = hadamard_interaction(A, B);
  CHECK(ab.parents == std::vector<std::string>{"A", "B"});
  CHECK_THROWS_AS((void)hadamard_interaction(spatial_component("s"), spatial_component("t")),
                  DomainError);
  CHECK_THROWS_AS((void)hadamard_interaction(A, build_global_matrix(3)), DimensionError);

  // Cluster {0,0,1} masks the 3-path spatial effect down to the pair (0,1).
  auto C = build_cluster_matrix({0, 0, 1}, "C");
  auto cs = hadamard_interaction(C, spatial_component("s"), "Cxs");
  CovariateSet set(3, {C, cs}, path3(), "s");
  auto terms = evaluate_terms(set, 0.5, 0);
  const Eigen::MatrixXd& P = terms.C[2];
  auto G = car_correlation(set.spectral(), 0.5);
  CHECK(P(0, 1) == doctest::Approx(G(0, 1)));
  CHECK(P(0, 1) != 0.0);
  CHECK(P(0, 2) == 0.0);
  CHECK(P(1, 2) == 0.0);
}

TEST_CASE("random cluster interactions stay PSD") {
  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 30; ++rep) {
    auto a = build_cluster_matrix(oracle::random_labels(10, 3, rng), "a");
    auto b = build_cluster_matrix(oracle::random_labels(10, 2, rng), "b");
    CHECK(min_eig(hadamard_interaction(a, b).matrix) >= -1e-8);
  }
}

TEST_CASE("matrix components are validated") {
  Eigen::Matrix2d m;
  m << 1, 0.5, 0.5, 1;
  CHECK_NOTHROW((void)matrix_component(m, "m"));
  m(0, 1) = 0.6;
  CHECK_THROWS_AS((void)matrix_component(m, "m"), DomainError);
  m << 1, 1.5, 1.5, 1;
  CHECK_THROWS_AS((void)matrix_component(m, "m"), DomainError);
  m << 2, 0, 0, 1;
  CHECK_THROWS_AS((void)matrix_component(m, "m"), DomainError);
  Eigen::Matrix3d n;
  n << 1, 0.9, -0.9, 0.9, 1, 0.9, -0.9, 0.9, 1;  // not PSD
  CHECK_THROWS_AS((void)matrix_component(n, "n"), DomainError);
}

TEST_CASE("covariate set structure") {
  auto A = build_cluster_matrix({0, 0, 1, 1}, "A");
  auto B = build_cluster_matrix({0, 1, 0, 1}, "B");
  auto AB = hadamard_interaction(A, B, "AB");
  auto As = hadamard_interaction(A, spatial_component("s"), "As");
  auto g = SpatialGraph::from_edges(4, {{0, 1}, {2, 3}, {1, 2}});
  CovariateSet set(4, {A, B, AB, As}, g, "s");
  CHECK(set.size() == 5);
  CHECK(set.roster() == std::vector<std::string>{"A", "B", "s", "AB", "As"});
  CHECK(set.free_names() == std::vector<std::string>{"A", "B", "AB", "As", "s", "beta"});

  auto sub = set.restrict({"A", "s", "As"});
  CHECK(sub.size() == 3);
  CHECK(sub.has_spatial());
  CHECK_THROWS_AS((void)set.restrict({"A", "As"}), DomainError);
  CHECK_THROWS_AS((void)set.restrict({"A", "AB"}), DomainError);
  auto flat = set.restrict({"A", "B"});
  CHECK_FALSE(flat.depends_on_beta());

  CHECK_THROWS_AS(CovariateSet(4, {A, A}), DomainError);
  CHECK_THROWS_AS(CovariateSet(4, {As}), DomainError);
  CHECK_THROWS_AS(CovariateSet(3, {A}), DimensionError);
}

TEST_CASE("assemble correlation examples") {
  CovariateSet only(3, {});
  ParameterVector p;
  p.alpha = Eigen::VectorXd::Ones(1);
  CHECK(assemble_correlation(p, only) == Eigen::MatrixXd::Identity(3, 3));

  CovariateSet two(2, {build_global_matrix(2, "J")});
  p.alpha = Eigen::Vector2d(0.7, 0.3);
  auto R = assemble_correlation(p, two);
  CHECK(R(0, 1) == doctest::Approx(0.3));
  CHECK(R(0, 0) == doctest::Approx(1.0));

  CovariateSet sp(2, {}, SpatialGraph::from_edges(2, {{0, 1}}));
  p.alpha = Eigen::VectorXd::Constant(1, 0.8);
  p.delta = 0.2;
  p.beta = 0.5;
  R = assemble_correlation(p, sp);
  CHECK(R(0, 1) == doctest::Approx(0.1).epsilon(1e-12));

  p.delta = 0.3;
  CHECK_THROWS_AS((void)assemble_correlation(p, sp), DomainError);
  p.delta.reset();
  CHECK_THROWS_AS((void)assemble_correlation(p, sp), DimensionError);
}

TEST_CASE("assembled correlation properties") {
  std::mt19937_64 rng(123);
  for (int rep = 0; rep < 100; ++rep) {
    const Eigen::Index d = 8;
    auto A = build_cluster_matrix(oracle::random_labels(d, 3, rng), "A");
    auto B = build_global_matrix(d, "B");
    auto As = hadamard_interaction(A, spatial_component(), "As");
    SpatialGraph g(oracle::random_graph(d, 0.4, rng));
    CovariateSet set(d, {A, B, As}, g);
    std::uniform_real_distribution<double> ub(0.05, 0.95);
    const double beta = ub(rng);
    auto draw = [&] {
      return ParameterVector::from_weights(oracle::random_simplex(5, rng), beta);
    };
    auto t1 = draw(), t2 = draw();
    auto R1 = assemble_correlation(t1, set);
    auto R2 = assemble_correlation(t2, set);
    CHECK((R1.diagonal().array() - 1.0).abs().maxCoeff() < 1e-10);
    CHECK(min_eig(R1) >= t1.alpha(0) - 1e-8);
    ParameterVector mid = ParameterVector::from_weights(0.5 * (t1.weights() + t2.weights()), beta);
    CHECK((R1 + R2 - 2.0 * assemble_correlation(mid, set)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("jacobian matches finite differences of assembly") {
  std::mt19937_64 rng(4);
  const Eigen::Index d = 6;
  auto A = build_cluster_matrix(oracle::random_labels(d, 2, rng), "A");
  auto As = hadamard_interaction(A, spatial_component(), "As");
  CovariateSet set(d, {A, As}, SpatialGraph(oracle::random_graph(d, 0.6, rng)));
  auto theta = ParameterVector::from_weights(Eigen::Vector4d(0.4, 0.2, 0.1, 0.3), 0.6);
  auto terms = evaluate_terms(set, theta.beta, 1);
  auto J = correlation_jacobian(theta, terms);
  REQUIRE(J.size() == 4);
  auto f = [&](double b) {
    auto t = theta;
    t.beta = b;
    return assemble_correlation(t, set);
  };
  CHECK((J[3] - oracle::central_diff_matrix(f, 0.6, 1e-6)).cwiseAbs().maxCoeff() < 1e-7);
  CHECK((J[0] - (A.matrix - Eigen::MatrixXd::Identity(d, d))).norm() == 0.0);
}
