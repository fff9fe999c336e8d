#include "structcov/mle.hpp"

#include "structcov/error.hpp"
#include "structcov/optim.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace structcov {

namespace {

double frob(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return a.cwiseProduct(b).sum(); }

}  // namespace

Likelihood::Likelihood(const CovariateSet& set, const StandardizedErrors& errors) : set_(&set) {
  const Eigen::Index T = errors.T(), d = errors.d();
  if (d != set.dimension()) throw DimensionError("data dimension differs from the model");
  if (errors.mask.rows() != T || errors.mask.cols() != d)
    throw DimensionError("mask shape differs from the errors");
  T_ = static_cast<double>(T);
  if (T == 0) throw EstimationError("no observations");

  std::map<std::vector<bool>, std::size_t> index;
  for (Eigen::Index t = 0; t < T; ++t) {
    std::vector<bool> key(static_cast<std::size_t>(d));
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < d; ++i)
      if (errors.mask(t, i)) {
        key[static_cast<std::size_t>(i)] = true;
        idx.push_back(i);
      }
    if (idx.empty()) continue;
    auto [it, inserted] = index.emplace(key, groups_.size());
    if (inserted) {
      Group g;
      g.idx = idx;
      g.S = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(idx.size()),
                                  static_cast<Eigen::Index>(idx.size()));
      groups_.push_back(std::move(g));
    }
    Group& g = groups_[it->second];
    Eigen::VectorXd e(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) e(static_cast<Eigen::Index>(k)) = errors.values(t, idx[k]);
    g.S.noalias() += e * e.transpose();
    g.n += 1.0;
    n_obs_ += static_cast<double>(idx.size());
  }
  if (groups_.empty()) throw EstimationError("every observation is missing");
}

Likelihood::Likelihood(const CovariateSet& set, const Eigen::MatrixXd& S_T) : set_(&set) {
  const Eigen::Index d = set.dimension();
  if (S_T.rows() != d || S_T.cols() != d) throw DimensionError("S_T has the wrong shape");
  Group g;
  for (Eigen::Index i = 0; i < d; ++i) g.idx.push_back(i);
  g.S = S_T;
  g.n = 1.0;
  groups_.push_back(std::move(g));
  T_ = 1.0;
  n_obs_ = static_cast<double>(d);
}

bool Likelihood::accumulate(const Eigen::MatrixXd& R, double& val, Eigen::MatrixXd* W) const {
  val = 0.0;
  const Eigen::Index d = R.rows();
  if (W) *W = Eigen::MatrixXd::Zero(d, d);
  for (const auto& g : groups_) {
    const auto m = static_cast<Eigen::Index>(g.idx.size());
    const bool full = m == d;
    Eigen::MatrixXd Rg;
    if (full) {
      Rg = R;
    } else {
      Rg.resize(m, m);
      for (Eigen::Index a = 0; a < m; ++a)
        for (Eigen::Index b = 0; b < m; ++b) Rg(a, b) = R(g.idx[a], g.idx[b]);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(Rg);
    if (llt.info() != Eigen::Success) return false;
    const Eigen::MatrixXd& L = llt.matrixLLT();
    double logdet = 0.0;
    for (Eigen::Index a = 0; a < m; ++a) {
      if (!(L(a, a) > 0.0)) return false;
      logdet += 2.0 * std::log(L(a, a));
    }
    if (!W) {
      val += -g.n * logdet - llt.solve(g.S).trace();
      continue;
    }
    const Eigen::MatrixXd Rinv = llt.solve(Eigen::MatrixXd::Identity(m, m));
    const Eigen::MatrixXd RS = Rinv * g.S;
    val += -g.n * logdet - RS.trace();
    Eigen::MatrixXd Wg = g.n * Rinv - RS * Rinv;
    if (full) {
      *W += Wg;
    } else {
      for (Eigen::Index a = 0; a < m; ++a)
        for (Eigen::Index b = 0; b < m; ++b) (*W)(g.idx[a], g.idx[b]) += Wg(a, b);
    }
  }
  val /= T_;
  if (W) *W /= T_;
  return std::isfinite(val);
}

double Likelihood::value(const ParameterVector& theta) const {
  validate_parameters(theta, *set_);
  double v = 0.0;
  if (!accumulate(assemble_correlation(theta, evaluate_terms(*set_, theta.beta, 0)), v, nullptr))
    throw EstimationError("model correlation matrix is not positive definite");
  return v;
}

double Likelihood::value_or_neg_inf(const ParameterVector& theta) const {
  double v = 0.0;
  if (!accumulate(assemble_correlation(theta, evaluate_terms(*set_, theta.beta, 0)), v, nullptr))
    return -std::numeric_limits<double>::infinity();
  return v;
}

Objective Likelihood::value_grad(const ParameterVector& theta) const {
  const ModelTerms terms = evaluate_terms(*set_, theta.beta, 1);
  const Eigen::MatrixXd R = assemble_correlation(theta, terms);
  Objective out;
  Eigen::MatrixXd W;
  if (!accumulate(R, out.value, &W)) {
    out.value = -std::numeric_limits<double>::infinity();
    return out;
  }
  const auto J = correlation_jacobian(theta, terms);
  out.grad.resize(static_cast<Eigen::Index>(J.size()));
  for (std::size_t i = 0; i < J.size(); ++i) out.grad(static_cast<Eigen::Index>(i)) = -frob(W, J[i]);
  return out;
}

double objective_l(const ParameterVector& theta, const CovariateSet& set, const Eigen::MatrixXd& S_T) {
  return Likelihood(set, S_T).value(theta);
}

Eigen::VectorXd gradient_l(const ParameterVector& theta, const CovariateSet& set,
                           const Eigen::MatrixXd& S_T) {
  validate_parameters(theta, set);
  Objective o = Likelihood(set, S_T).value_grad(theta);
  if (!std::isfinite(o.value)) throw EstimationError("model correlation matrix is not positive definite");
  return o.grad;
}

Objective objective_l_missing(const ParameterVector& theta, const CovariateSet& set,
                              const StandardizedErrors& errors) {
  validate_parameters(theta, set);
  Objective o = Likelihood(set, errors).value_grad(theta);
  if (!std::isfinite(o.value)) throw EstimationError("model correlation matrix is not positive definite");
  return o;
}

Eigen::VectorXd reparametrize(const ParameterVector& theta) {
  const Eigen::VectorXd w = theta.weights();
  const Eigen::Index nw = w.size();
  Eigen::VectorXd x(nw - 1 + (theta.beta ? 1 : 0));
  for (Eigen::Index k = 1; k < nw; ++k) x(k - 1) = std::log(w(k) / w(0));
  if (theta.beta) x(nw - 1) = std::log(*theta.beta / (1.0 - *theta.beta));
  return x.cwiseMax(-kCoordinateCap).cwiseMin(kCoordinateCap);
}

ParameterVector unreparametrize(const Eigen::VectorXd& x, const CovariateSet& set) {
  const auto nw = static_cast<Eigen::Index>(set.size() + (set.has_spatial() ? 1 : 0));
  const Eigen::Index expect = nw - 1 + (set.has_spatial() ? 1 : 0);
  if (x.size() != expect) throw DimensionError("wrong number of unconstrained coordinates");
  Eigen::VectorXd xc = x.cwiseMax(-kCoordinateCap).cwiseMin(kCoordinateCap);
  Eigen::VectorXd w(nw);
  w(0) = 0.0;
  w.tail(nw - 1) = xc.head(nw - 1);
  const double mx = w.maxCoeff();
  w = (w.array() - mx).exp().matrix();
  w /= w.sum();
  std::optional<double> beta;
  if (set.has_spatial()) beta = 1.0 / (1.0 + std::exp(-xc(nw - 1)));
  return ParameterVector::from_weights(w, beta);
}

Eigen::VectorXd chain_rule(const ParameterVector& theta, const Eigen::VectorXd& grad) {
  const Eigen::VectorXd w = theta.weights();
  const Eigen::Index nw = w.size();
  Eigen::VectorXd out(grad.size());
  // grad holds derivatives with alpha_0 eliminated: e_k = g_k - g_0.
  double mean = 0.0;
  for (Eigen::Index k = 1; k < nw; ++k) mean += w(k) * grad(k - 1);
  for (Eigen::Index k = 1; k < nw; ++k) out(k - 1) = w(k) * (grad(k - 1) - mean);
  if (theta.beta) out(nw - 1) = grad(nw - 1) * *theta.beta * (1.0 - *theta.beta);
  return out;
}

Eigen::MatrixXd fisher_information(const ParameterVector& theta, const CovariateSet& set) {
  validate_parameters(theta, set);
  const ModelTerms terms = evaluate_terms(set, theta.beta, 1);
  const Eigen::MatrixXd R = assemble_correlation(theta, terms);
  Eigen::LLT<Eigen::MatrixXd> llt(R);
  if (llt.info() != Eigen::Success) throw EstimationError("model correlation matrix is not positive definite");
  const auto J = correlation_jacobian(theta, terms);
  std::vector<Eigen::MatrixXd> M;
  for (const auto& D : J) M.push_back(llt.solve(D));
  const auto p = static_cast<Eigen::Index>(J.size());
  Eigen::MatrixXd I(p, p);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j <= i; ++j)
      I(i, j) = I(j, i) =
          0.5 * M[static_cast<std::size_t>(i)].cwiseProduct(M[static_cast<std::size_t>(j)].transpose()).sum();
  return I;
}

FitResult fit_sce(const StandardizedErrors& errors, const CovariateSet& set,
                  const ParameterVector& theta0, const FitOptions& options) {
  validate_parameters(theta0, set);
  const Likelihood lik(set, errors);
  FitResult res;
  res.T = lik.T();
  res.observed = lik.observed_count();
  res.names = set.free_names();
  res.loglik_initial = lik.value(theta0);

  const Eigen::VectorXd x0 = reparametrize(theta0);
  if (x0.size() == 0) {
    res.theta = theta0;
    res.loglik_transformed = res.loglik_initial;
    res.converged = true;
  } else {
    ValueGrad fg = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
      const ParameterVector th = unreparametrize(x, set);
      const Objective o = lik.value_grad(th);
      if (!std::isfinite(o.value)) return std::numeric_limits<double>::infinity();
      g = -chain_rule(th, o.grad);
      return -o.value;
    };
    BfgsOptions bo;
    bo.grad_tol = options.grad_tol;
    bo.max_iterations = options.max_iterations;
    bo.c1 = options.c1;
    bo.c2 = options.c2;
    bo.lower = -kCoordinateCap;
    bo.upper = kCoordinateCap;
    const BfgsResult br = minimize_bfgs(fg, x0, bo);
    res.theta = unreparametrize(br.x, set);
    res.loglik_transformed = -br.f;
    res.converged = br.converged;
    res.iterations = br.iterations;
    res.grad_norm = br.pg_norm;
    if (res.loglik_transformed < res.loglik_initial) {
      res.theta = theta0;
      res.loglik_transformed = res.loglik_initial;
      const Objective o = lik.value_grad(theta0);
      res.grad_norm = chain_rule(theta0, o.grad).cwiseAbs().maxCoeff();
      res.converged = res.grad_norm < options.grad_tol;
    }
  }
  res.R = assemble_correlation(res.theta, set);
  res.fisher = fisher_information(res.theta, set);
  return res;
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile level must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

std::vector<ConfidenceInterval> confidence_intervals(const FitResult& fit, double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("confidence level must lie in (0, 1)");
  const Eigen::Index p = fit.fisher.rows();
  std::vector<ConfidenceInterval> out;
  if (p == 0) return out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(fit.fisher);
  const Eigen::VectorXd& ev = eig.eigenvalues();
  if (!(ev(0) > 1e-12 * std::max(1.0, ev(p - 1)))) {
    Eigen::Index worst = 0;
    eig.eigenvectors().col(0).cwiseAbs().maxCoeff(&worst);
    std::ostringstream msg;
    msg << "Fisher information is singular; flat direction dominated by '"
        << fit.names[static_cast<std::size_t>(worst)] << "'";
    throw EstimationError(msg.str());
  }
  const Eigen::MatrixXd cov = eig.eigenvectors() * ev.cwiseInverse().asDiagonal() *
                              eig.eigenvectors().transpose() / fit.T;
  const double z = normal_quantile(0.5 + 0.5 * level);
  const Eigen::VectorXd est = fit.theta.free();
  for (Eigen::Index i = 0; i < p; ++i) {
    ConfidenceInterval ci;
    ci.name = fit.names[static_cast<std::size_t>(i)];
    ci.estimate = est(i);
    ci.std_error = std::sqrt(std::max(0.0, cov(i, i)));
    ci.lower = est(i) - z * ci.std_error;
    ci.upper = est(i) + z * ci.std_error;
    out.push_back(ci);
  }
  return out;
}

}  // namespace structcov
