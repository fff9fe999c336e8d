#include "structcov/identify.hpp"

#include "structcov/error.hpp"
#include "structcov/lp.hpp"
#include "structcov/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace structcov {

std::vector<double> linspace_grid(double start, double stop, int count) {
  if (count < 1) throw DomainError("grid needs at least one point");
  if (!(start > 0.0 && stop < 1.0 && start <= stop))
    throw DomainError("grid must lie inside (0, 1) with start <= stop");
  std::vector<double> g;
  for (int i = 0; i < count; ++i)
    g.push_back(count == 1 ? start : start + (stop - start) * i / (count - 1));
  return g;
}

std::vector<double> default_beta_grid() { return linspace_grid(0.02, 0.98, 25); }

namespace {

Eigen::VectorXd upper_vec(const Eigen::MatrixXd& m) {
  const Eigen::Index d = m.rows();
  Eigen::VectorXd v(d * (d + 1) / 2);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i <= j; ++i) v(k++) = m(i, j);
  return v;
}

std::vector<Eigen::VectorXd> columns(const CovariateSet& set, const ModelTerms& t) {
  std::vector<Eigen::VectorXd> cols;
  for (const auto& c : t.C) cols.push_back(upper_vec(c));
  if (set.has_spatial()) cols.push_back(upper_vec(t.G));
  return cols;
}

}  // namespace

Eigen::Index stacked_rank(const std::vector<Eigen::MatrixXd>& mats) {
  if (mats.empty()) return 0;
  const Eigen::Index m = mats.front().rows() * (mats.front().rows() + 1) / 2;
  Eigen::MatrixXd S(m, static_cast<Eigen::Index>(mats.size()));
  for (std::size_t k = 0; k < mats.size(); ++k) S.col(static_cast<Eigen::Index>(k)) = upper_vec(mats[k]);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(S);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cut = 1e-9 * std::max(1.0, s(0));
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > cut) ++r;
  return r;
}

IdentifiabilityReport check_identifiability(const CovariateSet& set,
                                            const std::vector<double>& beta_grid, double tol,
                                            std::size_t threads) {
  if (!(tol > 0.0)) throw DomainError("identifiability tolerance must be positive");
  IdentifiabilityReport rep;
  rep.tol = tol;
  const bool spatial = set.depends_on_beta();
  if (spatial) {
    for (double b : beta_grid)
      if (!(b > 0.0 && b < 1.0)) throw DomainError("beta grid values must lie inside (0, 1)");
    rep.grid = beta_grid;
    std::sort(rep.grid.begin(), rep.grid.end());
    rep.grid.erase(std::unique(rep.grid.begin(), rep.grid.end()), rep.grid.end());
  }

  const std::size_t nw = set.size() + (set.has_spatial() ? 1 : 0);
  std::vector<ModelTerms> terms;
  if (spatial) {
    for (double b : rep.grid) terms.push_back(evaluate_terms(set, b, 0));
  } else {
    terms.push_back(evaluate_terms(set, std::nullopt, 0));
  }

  for (std::size_t g = 0; g < terms.size(); ++g) {
    std::vector<Eigen::MatrixXd> mats = terms[g].C;
    if (set.has_spatial()) mats.push_back(terms[g].G);
    if (stacked_rank(mats) != static_cast<Eigen::Index>(nw)) {
      rep.independence_ok = false;
      if (spatial) rep.dependent_betas.push_back(rep.grid[g]);
    }
  }

  if (spatial && rep.grid.size() > 1) {
    // Objective weights: every term whose matrix moves with beta.
    Eigen::VectorXd moving = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nw));
    for (std::size_t k = 0; k < set.size(); ++k)
      if (set.component(k).spatial_parent) moving(static_cast<Eigen::Index>(k)) = 1.0;
    if (set.has_spatial()) moving(static_cast<Eigen::Index>(nw) - 1) = 1.0;

    const std::size_t G = rep.grid.size();
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t a = 0; a < G; ++a)
      for (std::size_t b = 0; b < G; ++b)
        if (a != b) pairs.emplace_back(a, b);

    std::vector<std::vector<Eigen::VectorXd>> cols(G);
    for (std::size_t g = 0; g < G; ++g) cols[g] = columns(set, terms[g]);

    const auto n = static_cast<Eigen::Index>(2 * nw);
    std::vector<LpResult> results(pairs.size());
    parallel_for(pairs.size(), threads, [&](std::size_t p) {
      const auto [a, b] = pairs[p];
      const Eigen::Index m = cols[a].front().size();
      Eigen::MatrixXd E(m, n);
      for (std::size_t k = 0; k < nw; ++k) {
        E.col(static_cast<Eigen::Index>(k)) = cols[a][k];
        E.col(static_cast<Eigen::Index>(nw + k)) = -cols[b][k];
      }
      Eigen::MatrixXd Ec = compress_rows(E);
      Eigen::MatrixXd A(Ec.rows() + 2, n);
      A.topRows(Ec.rows()) = Ec;
      A.row(Ec.rows()).setZero();
      A.row(Ec.rows()).head(static_cast<Eigen::Index>(nw)).setOnes();
      A.row(Ec.rows() + 1).setZero();
      A.row(Ec.rows() + 1).tail(static_cast<Eigen::Index>(nw)).setOnes();
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(A.rows());
      rhs(Ec.rows()) = 1.0;
      rhs(Ec.rows() + 1) = 1.0;
      Eigen::VectorXd c(n);
      c << moving, moving;
      results[p] = simplex_maximize(A, rhs, c);
    });

    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto [a, b] = pairs[p];
      const LpResult& r = results[p];
      if (r.status != LpResult::Status::optimal) {
        std::ostringstream msg;
        msg << "identifiability LP did not reach an optimum at beta=" << rep.grid[a]
            << ", beta'=" << rep.grid[b];
        throw SolverError(msg.str());
      }
      rep.pairs.push_back({rep.grid[a], rep.grid[b], r.value});
      rep.max_lp_value = std::max(rep.max_lp_value, r.value);
      if (r.value > tol) {
        IdentifiabilityWitness w;
        w.beta = rep.grid[a];
        w.beta_prime = rep.grid[b];
        w.lp_value = r.value;
        const auto nwi = static_cast<Eigen::Index>(nw);
        w.theta = ParameterVector::from_weights(r.x.head(nwi), w.beta);
        w.theta_prime = ParameterVector::from_weights(r.x.tail(nwi), w.beta_prime);
        if (!set.has_spatial()) {
          w.theta.delta.reset();
          w.theta_prime.delta.reset();
        }
        Eigen::MatrixXd diff = Eigen::MatrixXd::Zero(set.dimension(), set.dimension());
        for (std::size_t k = 0; k < set.size(); ++k) {
          diff += w.theta.alpha(static_cast<Eigen::Index>(k)) * terms[a].C[k];
          diff -= w.theta_prime.alpha(static_cast<Eigen::Index>(k)) * terms[b].C[k];
        }
        if (set.has_spatial()) diff += *w.theta.delta * terms[a].G - *w.theta_prime.delta * terms[b].G;
        w.residual = diff.cwiseAbs().maxCoeff();
        rep.witnesses.push_back(std::move(w));
      }
    }
  }
  rep.identifiable = rep.independence_ok && rep.witnesses.empty();
  return rep;
}

}  // namespace structcov
