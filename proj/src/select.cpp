#include "structcov/select.hpp"

#include "structcov/error.hpp"
#include "structcov/identify.hpp"
#include "structcov/init.hpp"
#include "structcov/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

namespace structcov {

namespace {

// Parents of each roster entry as roster positions; empty for main effects.
std::vector<std::vector<int>> parent_positions(const CovariateSet& set) {
  const auto& roster = set.roster();
  std::vector<std::vector<int>> out(roster.size());
  for (std::size_t k = 1; k < set.size(); ++k) {
    const auto& c = set.component(k);
    const int pos = set.roster_index(c.name);
    for (const auto& p : c.parents) out[static_cast<std::size_t>(pos)].push_back(set.roster_index(p));
  }
  return out;
}

}  // namespace

std::vector<std::vector<std::string>> enumerate_models(const CovariateSet& set) {
  const auto& roster = set.roster();
  if (roster.size() > 24) throw DomainError("too many terms to enumerate");
  const auto parents = parent_positions(set);
  std::vector<std::vector<std::string>> out;
  const std::uint32_t n = 1u << roster.size();
  for (std::uint32_t mask = 1; mask < n; ++mask) {
    bool ok = true;
    for (std::size_t i = 0; i < roster.size() && ok; ++i) {
      if (!(mask >> i & 1u)) continue;
      for (int p : parents[i])
        if (!(mask >> p & 1u)) ok = false;
    }
    if (!ok) continue;
    std::vector<std::string> terms;
    for (std::size_t i = 0; i < roster.size(); ++i)
      if (mask >> i & 1u) terms.push_back(roster[i]);
    out.push_back(std::move(terms));
  }
  return out;
}

double total_loglik(const FitResult& fit) {
  return 0.5 * fit.T * fit.loglik_transformed - 0.5 * fit.observed * std::log(2.0 * std::numbers::pi);
}

double bic(double loglik, std::size_t n_terms, bool spatial, double T, int G) {
  if (T <= 0) throw DomainError("T must be positive");
  const double k = static_cast<double>(n_terms) + (spatial ? G : 0);
  return -2.0 * loglik + k * std::log(T);
}

double bic(const FitResult& fit, const CovariateSet& model, int G) {
  return bic(total_loglik(fit), model.roster().size(), model.has_spatial(), fit.T, G);
}

SelectionReport select_best(const StandardizedErrors& errors, const CovariateSet& set,
                            const SelectOptions& options) {
  const auto models = enumerate_models(set);
  if (models.empty()) throw DomainError("no candidate models");
  const auto grid = options.beta_grid.empty() ? default_beta_grid() : options.beta_grid;
  const Eigen::MatrixXd R_hat = pearson_type(errors);

  std::vector<ModelCandidate> cands(models.size());
  parallel_for(models.size(), options.threads, [&](std::size_t m) {
    ModelCandidate& c = cands[m];
    c.terms = models[m];
    c.enumeration_index = m;
    try {
      const CovariateSet sub = set.restrict(c.terms);
      const auto init = qp_init(R_hat, sub, grid);
      FitResult fit = fit_sce(errors, sub, init.theta0, options.fit);
      c.bic = bic(fit, sub, options.G);
      c.converged = fit.converged;
      c.fit = std::move(fit);
    } catch (const Error& e) {
      c.error = e.what();
      c.bic = std::numeric_limits<double>::infinity();
    }
  });

  std::stable_sort(cands.begin(), cands.end(), [](const ModelCandidate& a, const ModelCandidate& b) {
    if (a.bic != b.bic) return a.bic < b.bic;
    return a.enumeration_index < b.enumeration_index;
  });

  SelectionReport report;
  for (std::size_t k = 1; k < set.size(); ++k)
    if (set.component(k).parents.empty()) report.reference.push_back(set.component(k).name);
  if (set.has_spatial()) report.reference.push_back(set.spatial_name());
  std::set<std::string> ref_set(report.reference.begin(), report.reference.end());
  double center = cands.front().bic;
  bool found = false;
  for (const auto& c : cands)
    if (std::set<std::string>(c.terms.begin(), c.terms.end()) == ref_set && std::isfinite(c.bic)) {
      center = c.bic;
      found = true;
      report.reference = c.terms;
    }
  if (!found) report.reference = cands.front().terms;
  for (auto& c : cands) c.centered_bic = c.bic - center;
  report.ranking = std::move(cands);
  return report;
}

std::vector<Effect> average_effects(const ParameterVector& theta, const CovariateSet& set) {
  validate_parameters(theta, set);
  std::vector<Effect> out;
  ModelTerms terms;
  Eigen::MatrixXd M;
  if (set.has_spatial()) {
    terms = evaluate_terms(set, theta.beta, 0);
    M = set.graph()->adjacency();
  }
  auto neighbor_mean = [&](const Eigen::MatrixXd& V, const Eigen::MatrixXd* F, std::size_t& pairs) {
    double s = 0.0;
    pairs = 0;
    for (Eigen::Index j = 0; j < M.cols(); ++j)
      for (Eigen::Index i = 0; i < M.rows(); ++i) {
        if (i == j || M(i, j) != 1.0) continue;
        if (F && (*F)(i, j) != 1.0) continue;
        s += V(i, j);
        ++pairs;
      }
    return pairs ? s / static_cast<double>(pairs) : 0.0;
  };

  for (const auto& name : set.roster()) {
    Effect e;
    e.name = name;
    if (set.has_spatial() && name == set.spatial_name()) {
      e.kind = ComponentKind::spatial;
      e.value = *theta.delta * neighbor_mean(terms.G, nullptr, e.pairs);
      out.push_back(std::move(e));
      continue;
    }
    std::size_t k = 1;
    while (set.component(k).name != name) ++k;
    const auto& c = set.component(k);
    const double a = theta.alpha(static_cast<Eigen::Index>(k));
    e.kind = c.kind;
    if (c.spatial_parent)
      e.value = a * neighbor_mean(terms.C[k], &c.matrix, e.pairs);
    else
      e.value = a;
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace structcov
