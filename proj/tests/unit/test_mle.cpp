#include "doctest.h"
#include "oracles.hpp"

#include "structcov/error.hpp"
#include "structcov/identify.hpp"
#include "structcov/init.hpp"
#include "structcov/mle.hpp"

#include <cmath>

using namespace structcov;

namespace {

struct RandomModel {
  CovariateSet set;
  ParameterVector theta;
};

RandomModel random_model(std::mt19937_64& rng, Eigen::Index d) {
  auto A = build_cluster_matrix(oracle::random_labels(d, 3, rng), "A");
  auto B = build_cluster_matrix(oracle::random_labels(d, 2, rng), "B");
  auto As = hadamard_interaction(A, spatial_component(), "As");
  CovariateSet set(d, {A, B, As}, SpatialGraph(oracle::random_graph(d, 0.4, rng)));
  std::uniform_real_distribution<double> ub(0.1, 0.9);
  auto theta = ParameterVector::from_weights(oracle::random_simplex(5, rng, 0.03), ub(rng));
  return {std::move(set), std::move(theta)};
}

Eigen::MatrixXd random_errors(std::mt19937_64& rng, Eigen::Index T, Eigen::Index d) {
  std::normal_distribution<double> z;
  Eigen::MatrixXd e(T, d);
  for (Eigen::Index t = 0; t < T; ++t)
    for (Eigen::Index i = 0; i < d; ++i) e(t, i) = z(rng);
  return e;
}

// Errors whose second moment equals R exactly.
Eigen::MatrixXd exact_errors(const Eigen::MatrixXd& R, Eigen::Index T, std::mt19937_64& rng) {
  const Eigen::Index d = R.rows();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_errors(rng, T, d));
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(T, d);
  Eigen::MatrixXd L = R.llt().matrixL();
  return std::sqrt(static_cast<double>(T)) * Q * L.transpose();
}

Eigen::VectorXd fd_gradient(const Likelihood& lik, const ParameterVector& theta, double h) {
  // Perturb free coordinates; the identity weight absorbs the change.
  Eigen::VectorXd f = theta.free();
  Eigen::VectorXd g(f.size());
  const Eigen::Index nweights = theta.weights().size() - 1;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    auto shifted = [&](double step) {
      ParameterVector t = theta;
      if (i < nweights) {
        Eigen::VectorXd w = theta.weights();
        w(i + 1) += step;
        w(0) -= step;
        t = ParameterVector::from_weights(w, theta.beta);
      } else {
        t.beta = *theta.beta + step;
      }
      return lik.value(t);
    };
    g(i) = (shifted(h) - shifted(-h)) / (2 * h);
  }
  return g;
}

}  // namespace

TEST_CASE("objective examples") {
  CovariateSet only(3, {});
  ParameterVector id;
  id.alpha = Eigen::VectorXd::Ones(1);
  CHECK(objective_l(id, only, Eigen::MatrixXd::Identity(3, 3)) == doctest::Approx(-3.0));
  CovariateSet only2(2, {});
  CHECK(objective_l(id, only2, 2.0 * Eigen::MatrixXd::Identity(2, 2)) == doctest::Approx(-4.0));

  CovariateSet sp(2, {}, SpatialGraph::from_edges(2, {{0, 1}}));
  ParameterVector t;
  t.alpha = Eigen::VectorXd::Constant(1, 0.8);
  t.delta = 0.2;
  t.beta = 0.5;
  auto R = assemble_correlation(t, sp);
  CHECK(objective_l(t, sp, R) == doctest::Approx(-std::log(0.99) - 2.0).epsilon(1e-12));
  CHECK(gradient_l(t, sp, R).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(gradient_l(id, only, Eigen::MatrixXd::Identity(3, 3)).size() == 0);
}

TEST_CASE("gradient at the identity for a global pair") {
  CovariateSet set(2, {build_global_matrix(2)});
  ParameterVector t;
  t.alpha = Eigen::Vector2d(1.0, 0.0);
  const double s = 0.37;
  Eigen::Matrix2d S;
  S << 1, s, s, 1;
  auto g = gradient_l(t, set, S);
  CHECK(g(0) == doctest::Approx(2 * s));
}

TEST_CASE("analytic gradient matches finite differences") {
  std::mt19937_64 rng(1001);
  for (int rep = 0; rep < 100; ++rep) {
    auto m = random_model(rng, 7);
    const bool missing = rep % 2 == 1;
    auto e = StandardizedErrors::from_complete(random_errors(rng, 9, 7));
    if (missing) {
      std::bernoulli_distribution drop(0.2);
      for (Eigen::Index t = 0; t < 9; ++t)
        for (Eigen::Index i = 0; i < 7; ++i)
          if (drop(rng)) e.mask(t, i) = false;
    }
    Likelihood lik = missing ? Likelihood(m.set, e) : Likelihood(m.set, second_moment(e));
    auto analytic = lik.value_grad(m.theta);
    CHECK(analytic.value == doctest::Approx(lik.value(m.theta)));
    auto fd = fd_gradient(lik, m.theta, 1e-6);
    for (Eigen::Index i = 0; i < fd.size(); ++i)
      CHECK(oracle::rel_err(analytic.grad(i), fd(i), 1e-3) < 1e-5);
  }
}

TEST_CASE("missing-data objective reductions") {
  std::mt19937_64 rng(4);
  auto m = random_model(rng, 6);
  auto e = StandardizedErrors::from_complete(random_errors(rng, 12, 6));
  auto full = Likelihood(m.set, second_moment(e)).value_grad(m.theta);
  auto miss = objective_l_missing(m.theta, m.set, e);
  CHECK(std::abs(full.value - miss.value) < 1e-12);
  CHECK((full.grad - miss.grad).cwiseAbs().maxCoeff() < 1e-12);

  // A variable that is never observed drops out of the likelihood.
  auto e2 = e;
  e2.mask.col(5).setConstant(false);
  auto R = assemble_correlation(m.theta, m.set);
  Eigen::MatrixXd R5 = R.topLeftCorner(5, 5);
  Eigen::MatrixXd S5 = second_moment(e).topLeftCorner(5, 5);
  Eigen::LLT<Eigen::MatrixXd> llt(R5);
  const double expect = -std::log(R5.determinant()) - llt.solve(S5).trace();
  CHECK(objective_l_missing(m.theta, m.set, e2).value == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("missing-data objective on a hand-expanded case") {
  CovariateSet set(2, {build_global_matrix(2)});
  ParameterVector t;
  t.alpha = Eigen::Vector2d(0.6, 0.4);
  Eigen::MatrixXd v(2, 2);
  v << 0.5, -1.2, 0.8, 0.0;
  auto e = StandardizedErrors::from_complete(v);
  e.mask(1, 1) = false;
  // t = 1: bivariate term with r = 0.4; t = 2: univariate term with unit variance.
  const double r = 0.4, det = 1 - r * r;
  const double q1 = (0.5 * 0.5 - 2 * r * 0.5 * -1.2 + 1.2 * 1.2) / det;
  const double expect = 0.5 * ((-std::log(det) - q1) + (-0.0 - 0.8 * 0.8));
  CHECK(objective_l_missing(t, set, e).value == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("reparametrization") {
  CovariateSet sp(4, {build_cluster_matrix({0, 0, 1, 1}, "A")}, SpatialGraph::from_edges(4, {{0, 1}}));
  auto uni = ParameterVector::from_weights(Eigen::Vector3d::Constant(1.0 / 3), 0.5);
  CHECK(reparametrize(uni).cwiseAbs().maxCoeff() < 1e-15);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> ub(0.01, 0.99);
  for (int rep = 0; rep < 100; ++rep) {
    auto t = ParameterVector::from_weights(oracle::random_simplex(3, rng, 1e-4), ub(rng));
    auto back = unreparametrize(reparametrize(t), sp);
    CHECK((back.weights() - t.weights()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(*back.beta - *t.beta) < 1e-10);
  }
  Eigen::VectorXd big(3);
  big << 40, -40, 100;
  auto capped = unreparametrize(big, sp);
  CHECK(*capped.beta == doctest::Approx(1.0 / (1.0 + std::exp(-15.0))));
}

TEST_CASE("chain rule matches finite differences in unconstrained coordinates") {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 20; ++rep) {
    auto m = random_model(rng, 6);
    auto e = StandardizedErrors::from_complete(random_errors(rng, 10, 6));
    Likelihood lik(m.set, second_moment(e));
    Eigen::VectorXd x = reparametrize(m.theta);
    auto o = lik.value_grad(m.theta);
    Eigen::VectorXd gx = chain_rule(m.theta, o.grad);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      auto f = [&](double v) {
        Eigen::VectorXd y = x;
        y(i) = v;
        return lik.value(unreparametrize(y, m.set));
      };
      CHECK(oracle::rel_err(gx(i), oracle::central_diff(f, x(i), 1e-6), 1e-3) < 1e-5);
    }
  }
}

TEST_CASE("fit stays at a stationary start") {
  std::mt19937_64 rng(12);
  auto m = random_model(rng, 8);
  auto R = assemble_correlation(m.theta, m.set);
  auto e = StandardizedErrors::from_complete(exact_errors(R, 40, rng));
  CHECK((second_moment(e) - R).cwiseAbs().maxCoeff() < 1e-12);
  auto fit = fit_sce(e, m.set, m.theta);
  CHECK(fit.converged);
  CHECK((fit.theta.free() - m.theta.free()).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("identity-only fit returns immediately") {
  CovariateSet only(4, {});
  ParameterVector id;
  id.alpha = Eigen::VectorXd::Ones(1);
  std::mt19937_64 rng(3);
  auto e = StandardizedErrors::from_complete(random_errors(rng, 10, 4));
  auto fit = fit_sce(e, only, id);
  CHECK(fit.converged);
  CHECK(fit.iterations == 0);
  CHECK(fit.loglik_transformed == doctest::Approx(-second_moment(e).trace()));
  CHECK(fit.fisher.size() == 0);
}

TEST_CASE("fit improves on its start and converges") {
  std::mt19937_64 rng(77);
  for (int rep = 0; rep < 10; ++rep) {
    auto m = random_model(rng, 12);
    auto R = assemble_correlation(m.theta, m.set);
    Eigen::MatrixXd L = R.llt().matrixL();
    auto e = StandardizedErrors::from_complete(random_errors(rng, 30, 12) * L.transpose());
    auto init = qp_init(pearson_type(e), m.set, linspace_grid(0.05, 0.95, 10));
    auto fit = fit_sce(e, m.set, init.theta0);
    CHECK(fit.loglik_transformed >= Likelihood(m.set, e).value(init.theta0));
    CHECK(fit.converged);
    CHECK(fit.grad_norm < 1e-6);
    CHECK((fit.R - assemble_correlation(fit.theta, m.set)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("fit is invariant under a consistent permutation of variables") {
  std::mt19937_64 rng(5150);
  const Eigen::Index d = 10;
  auto labels = oracle::random_labels(d, 3, rng);
  Eigen::MatrixXd M = oracle::random_graph(d, 0.35, rng);
  auto make = [&](const std::vector<Eigen::Index>& order) {
    std::vector<int> l;
    for (auto i : order) l.push_back(labels[static_cast<std::size_t>(i)]);
    return CovariateSet(d, {build_cluster_matrix(l, "A")}, SpatialGraph(M).permuted(order));
  };
  std::vector<Eigen::Index> id(d), perm(d);
  for (Eigen::Index i = 0; i < d; ++i) id[i] = i;
  perm = id;
  std::shuffle(perm.begin(), perm.end(), rng);
  auto s1 = make(id), s2 = make(perm);
  auto theta = ParameterVector::from_weights(Eigen::Vector3d(0.5, 0.2, 0.3), 0.6);
  Eigen::MatrixXd L = assemble_correlation(theta, s1).llt().matrixL();
  Eigen::MatrixXd y = random_errors(rng, 25, d) * L.transpose();
  Eigen::MatrixXd yp(25, d);
  for (Eigen::Index i = 0; i < d; ++i) yp.col(i) = y.col(perm[i]);
  auto e1 = StandardizedErrors::from_complete(y), e2 = StandardizedErrors::from_complete(yp);
  auto start = ParameterVector::from_weights(Eigen::Vector3d(0.4, 0.3, 0.3), 0.5);
  auto f1 = fit_sce(e1, s1, start), f2 = fit_sce(e2, s2, start);
  CHECK((f1.theta.free() - f2.theta.free()).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("fisher information") {
  CovariateSet set(2, {build_global_matrix(2)});
  ParameterVector t;
  t.alpha = Eigen::Vector2d(1.0, 0.0);
  auto I = fisher_information(t, set);
  CHECK(I(0, 0) == doctest::Approx(1.0));

  CovariateSet flat(3, {build_cluster_matrix({0, 1, 2}, "F")});
  t.alpha = Eigen::Vector2d(0.5, 0.5);
  CHECK(fisher_information(t, flat).cwiseAbs().maxCoeff() == 0.0);

  // Naive oracle with explicit inverses and finite-difference derivatives.
  std::mt19937_64 rng(8);
  auto m = random_model(rng, 6);
  auto F = fisher_information(m.theta, m.set);
  Eigen::MatrixXd Rinv = assemble_correlation(m.theta, m.set).inverse();
  const Eigen::Index p = F.rows();
  std::vector<Eigen::MatrixXd> D;
  const Eigen::VectorXd w = m.theta.weights();
  for (Eigen::Index i = 0; i < p; ++i) {
    auto at = [&](double step) {
      Eigen::VectorXd ww = w;
      double b = *m.theta.beta;
      if (i < p - 1) {
        ww(i + 1) += step;
        ww(0) -= step;
      } else {
        b += step;
      }
      return assemble_correlation(ParameterVector::from_weights(ww, b), m.set);
    };
    D.push_back((at(1e-6) - at(-1e-6)) / 2e-6);
  }
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j) {
      const double v = 0.5 * (Rinv * D[i] * Rinv * D[j]).trace();
      CHECK(oracle::rel_err(F(i, j), v, 1e-3) < 1e-6);
    }
}

TEST_CASE("confidence intervals") {
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-6));
  FitResult fit;
  fit.theta.alpha = Eigen::Vector2d(0.6, 0.4);
  fit.fisher = Eigen::MatrixXd::Identity(1, 1);
  fit.T = 1;
  fit.names = {"A"};
  auto ci = confidence_intervals(fit, 0.95);
  REQUIRE(ci.size() == 1);
  CHECK(ci[0].upper - ci[0].estimate == doctest::Approx(1.959964).epsilon(1e-6));
  fit.fisher(0, 0) = 0.0;
  CHECK_THROWS_AS((void)confidence_intervals(fit, 0.95), EstimationError);
}
