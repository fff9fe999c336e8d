#include "doctest.h"
#include "oracles.hpp"

#include "structcov/error.hpp"
#include "structcov/identify.hpp"
#include "structcov/init.hpp"
#include "structcov/rng.hpp"
#include "structcov/select.hpp"

#include <cmath>
#include <set>

using namespace structcov;

namespace {

CovariateSet tfr_roster(std::mt19937_64& rng, Eigen::Index d) {
  auto comcol = build_cluster_matrix(oracle::random_labels(d, 4, rng), "comcol");
  auto region = build_cluster_matrix(oracle::random_labels(d, 3, rng), "region");
  auto global = build_global_matrix(d, "global");
  auto sp = spatial_component("spatial");
  return CovariateSet(d,
                      {comcol, region, global, hadamard_interaction(comcol, region),
                       hadamard_interaction(comcol, sp), hadamard_interaction(region, sp)},
                      SpatialGraph(oracle::random_graph(d, 0.3, rng)));
}

// Count of hierarchical subsets by recursion over names, independent of bitmasks.
std::size_t count_hierarchical(const std::vector<std::string>& names,
                               const std::vector<std::vector<std::string>>& parents, std::size_t i,
                               std::set<std::string>& chosen) {
  if (i == names.size()) return chosen.empty() ? 0 : 1;
  std::size_t n = count_hierarchical(names, parents, i + 1, chosen);
  bool ok = true;
  for (const auto& p : parents[i]) ok = ok && chosen.count(p);
  if (ok) {
    chosen.insert(names[i]);
    n += count_hierarchical(names, parents, i + 1, chosen);
    chosen.erase(names[i]);
  }
  return n;
}

}  // namespace

TEST_CASE("enumeration on the TFR-style roster") {
  std::mt19937_64 rng(31);
  auto set = tfr_roster(rng, 10);
  CHECK(set.roster() == std::vector<std::string>{"comcol", "region", "global", "spatial",
                                                 "comcolxregion", "comcolxspatial", "regionxspatial"});
  auto models = enumerate_models(set);
  CHECK(models.size() == 35);
  // Main-effect subsets of {comcol, region, spatial} weighted by 2^(admissible interactions),
  // doubled for the global term, minus the empty model.
  CHECK(2 * (1 + 1 + 1 + 1 + 2 + 2 + 2 + 8) - 1 == 35);
  std::set<std::vector<std::string>> unique(models.begin(), models.end());
  CHECK(unique.size() == models.size());
  for (const auto& m : models) CHECK_NOTHROW((void)set.restrict(m));
}

TEST_CASE("enumeration small rosters") {
  const Eigen::Index d = 4;
  auto A = build_cluster_matrix({0, 0, 1, 1}, "A");
  auto B = build_cluster_matrix({0, 1, 0, 1}, "B");
  CovariateSet ab(d, {A, B, hadamard_interaction(A, B, "AB")});
  auto models = enumerate_models(ab);
  REQUIRE(models.size() == 4);
  CHECK(models[0] == std::vector<std::string>{"A"});
  CHECK(models[1] == std::vector<std::string>{"B"});
  CHECK(models[2] == std::vector<std::string>{"A", "B"});
  CHECK(models[3] == std::vector<std::string>{"A", "B", "AB"});
  CHECK(enumerate_models(CovariateSet(d, {A})).size() == 1);
}

TEST_CASE("enumeration count matches recursive oracle on random rosters") {
  std::mt19937_64 rng(32);
  for (int rep = 0; rep < 30; ++rep) {
    const Eigen::Index d = 5;
    std::uniform_int_distribution<int> nm(1, 4);
    const int mains = nm(rng);
    std::vector<ComponentMatrix> comps;
    for (int m = 0; m < mains; ++m)
      comps.push_back(build_cluster_matrix(oracle::random_labels(d, 2, rng), "M" + std::to_string(m)));
    std::bernoulli_distribution coin(0.5);
    for (int a = 0; a < mains; ++a)
      for (int b = a + 1; b < mains; ++b)
        if (coin(rng)) comps.push_back(hadamard_interaction(comps[a], comps[b]));
    CovariateSet set(d, comps);
    std::vector<std::string> names;
    std::vector<std::vector<std::string>> parents;
    for (const auto& c : comps) {
      names.push_back(c.name);
      parents.push_back(c.parents);
    }
    std::set<std::string> chosen;
    CHECK(enumerate_models(set).size() == count_hierarchical(names, parents, 0, chosen));
  }
}

TEST_CASE("BIC penalty arithmetic") {
  CHECK(bic(-10, 2, false, 11) - bic(-10, 1, false, 11) == doctest::Approx(std::log(11.0)).epsilon(1e-14));
  CHECK(std::log(11.0) == doctest::Approx(2.3979).epsilon(1e-4));
  CHECK(bic(-10, 2, true, 11) - bic(-10, 1, false, 11) == doctest::Approx(2 * std::log(11.0)).epsilon(1e-14));
  CHECK(bic(-10, 1, false, 11) == doctest::Approx(20 + std::log(11.0)));
  // A common shift of the log-likelihood shifts every BIC equally.
  CHECK(bic(-3, 2, false, 11) - bic(-3 - 7, 2, false, 11) == doctest::Approx(-14.0));
  CHECK_THROWS_AS((void)bic(0, 1, false, 0), DomainError);
}

TEST_CASE("total log-likelihood matches a direct Gaussian density") {
  std::mt19937_64 rng(33);
  const Eigen::Index d = 5, T = 12;
  auto A = build_cluster_matrix({0, 0, 1, 1, 2}, "A");
  CovariateSet set(d, {A});
  auto theta = ParameterVector::from_weights(Eigen::Vector2d(0.6, 0.4), std::nullopt);
  Rng g = make_stream(3, 0, "t");
  auto errors = StandardizedErrors::from_complete(sample_mvn(assemble_correlation(theta, set), T, g));
  auto fit = fit_sce(errors, set, theta);
  const Eigen::MatrixXd& R = fit.R;
  Eigen::LLT<Eigen::MatrixXd> llt(R);
  const double logdet = 2 * Eigen::MatrixXd(llt.matrixL()).diagonal().array().log().sum();
  double ll = 0;
  for (Eigen::Index t = 0; t < T; ++t) {
    Eigen::VectorXd e = errors.values.row(t).transpose();
    ll += -0.5 * (d * std::log(2 * M_PI) + logdet + e.dot(llt.solve(e)));
  }
  CHECK(total_loglik(fit) == doctest::Approx(ll).epsilon(1e-10));
}

TEST_CASE("average effects") {
  SpatialGraph tri = SpatialGraph::from_edges(3, {{0, 1}, {1, 2}, {0, 2}});
  auto A = build_cluster_matrix({0, 0, 1}, "A");
  CovariateSet set(3, {A}, tri);
  auto theta = ParameterVector::from_weights(Eigen::Vector3d(0.462, 0.038, 0.5), 0.5);
  auto eff = average_effects(theta, set);
  REQUIRE(eff.size() == 2);
  CHECK(eff[0].name == "A");
  CHECK(eff[0].value == 0.038);
  CHECK(eff[1].name == "spatial");
  CHECK(eff[1].value == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(eff[1].pairs == 6);

  auto theta0 = ParameterVector::from_weights(Eigen::Vector3d(0.962, 0.038, 0.0), 0.5);
  CHECK(average_effects(theta0, set)[1].value == 0.0);

  // Spatial interaction on the triangle: only the pair (0,1) shares a cluster.
  CovariateSet withx(3, {A, hadamard_interaction(A, spatial_component(), "As")}, tri);
  auto th = ParameterVector::from_weights(Eigen::Vector4d(0.4, 0.1, 0.2, 0.3), 0.5);
  auto ex = average_effects(th, withx);
  REQUIRE(ex.size() == 3);
  CHECK(ex[2].name == "As");
  CHECK(ex[2].pairs == 2);
  CHECK(ex[2].value == doctest::Approx(0.2 / 3.0).epsilon(1e-12));
}

TEST_CASE("spatial average effect lies in [0, delta]") {
  std::mt19937_64 rng(34);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int rep = 0; rep < 40; ++rep) {
    const Eigen::Index d = 6;
    Eigen::MatrixXd M = oracle::random_graph(d, 0.5, rng);
    if (M.sum() == 0) continue;
    CovariateSet set(d, {build_global_matrix(d)}, SpatialGraph(M));
    const double delta = 0.5 * u(rng);
    Eigen::Vector3d w(1 - 0.1 - delta, 0.1, delta);
    for (double beta : default_beta_grid()) {
      auto eff = average_effects(ParameterVector::from_weights(w, beta), set);
      CHECK(eff[1].value >= 0.0);
      CHECK(eff[1].value <= delta + 1e-15);
    }
  }
}

TEST_CASE("selection ranks the true model first") {
  const Eigen::Index d = 20, T = 40;
  std::mt19937_64 rng(35);
  auto A = build_cluster_matrix(oracle::random_labels(d, 3, rng), "A");
  auto N = build_cluster_matrix(oracle::random_labels(d, 4, rng), "N");
  CovariateSet truth(d, {A});
  auto theta = ParameterVector::from_weights(Eigen::Vector2d(0.6, 0.4), std::nullopt);
  Rng g = make_stream(35, 0, "select");
  auto errors = StandardizedErrors::from_complete(sample_mvn(assemble_correlation(theta, truth), T, g));

  CovariateSet set(d, {A, N});
  SelectOptions opt;
  auto rep = select_best(errors, set, opt);
  REQUIRE(rep.ranking.size() == 3);
  CHECK(rep.ranking.front().terms == std::vector<std::string>{"A"});
  CHECK(rep.reference == std::vector<std::string>{"A", "N"});
  for (const auto& c : rep.ranking) {
    CHECK(c.fit.has_value());
    CHECK(c.error.empty());
  }
  for (std::size_t i = 1; i < rep.ranking.size(); ++i)
    CHECK(rep.ranking[i - 1].bic <= rep.ranking[i].bic);

  opt.threads = 3;
  auto rep3 = select_best(errors, set, opt);
  for (std::size_t i = 0; i < rep.ranking.size(); ++i) {
    CHECK(rep.ranking[i].terms == rep3.ranking[i].terms);
    CHECK(rep.ranking[i].bic == rep3.ranking[i].bic);
  }

  auto single = select_best(errors, CovariateSet(d, {A}));
  REQUIRE(single.ranking.size() == 1);
  CHECK(single.ranking[0].centered_bic == 0.0);
}

TEST_CASE("selection flags candidates that cannot be fitted") {
  const Eigen::Index d = 4;
  auto A = build_cluster_matrix({0, 0, 1, 1}, "A");
  auto B = build_cluster_matrix({0, 0, 1, 1}, "B");  // duplicate of A
  std::mt19937_64 rng(36);
  Rng g = make_stream(36, 0, "dup");
  CovariateSet set(d, {A, B});
  auto theta = ParameterVector::from_weights(Eigen::Vector3d(0.5, 0.3, 0.2), std::nullopt);
  auto errors = StandardizedErrors::from_complete(sample_mvn(assemble_correlation(theta, set), 30, g));
  auto rep = select_best(errors, set);
  REQUIRE(rep.ranking.size() == 3);
  CHECK_FALSE(rep.ranking.back().error.empty());
  CHECK(std::isinf(rep.ranking.back().bic));
  CHECK(rep.ranking.back().terms == std::vector<std::string>{"A", "B"});
  CHECK(rep.reference == rep.ranking.front().terms);
}
