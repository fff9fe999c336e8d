#include "structcov/shrink.hpp"

#include "structcov/error.hpp"
#include "structcov/init.hpp"
#include "structcov/parallel.hpp"
#include "structcov/rng.hpp"

#include <algorithm>
#include <cmath>

namespace structcov {

namespace {

constexpr double kEigenFloor = 1e-8;

bool qualifies(const Eigen::MatrixXd& M) {
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 0.0) return false;
  if ((M.diagonal().array() != 1.0).any()) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= kEigenFloor;
}

Eigen::MatrixXd eigen_floor(const Eigen::MatrixXd& M, double floor) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M);
  const Eigen::VectorXd ev = eig.eigenvalues().cwiseMax(floor);
  Eigen::MatrixXd X = eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (X + X.transpose());
}

double kernel(double r, double n) { return n < 2.0 ? 0.0 : std::pow(1.0 - r * r, 2) / (n - 1.0); }

}  // namespace

NearestPdResult nearest_pd_correlation_ex(const Eigen::MatrixXd& M, double tol, int max_sweeps) {
  if (M.rows() != M.cols()) throw DimensionError("matrix must be square");
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + M.cwiseAbs().maxCoeff()))
    throw DomainError("matrix must be symmetric");
  NearestPdResult out;
  if (qualifies(M)) {
    out.matrix = M;
    return out;
  }
  Eigen::MatrixXd Y = 0.5 * (M + M.transpose());
  Y.diagonal().setOnes();
  Eigen::MatrixXd dS = Eigen::MatrixXd::Zero(M.rows(), M.cols());
  out.converged = false;
  for (out.sweeps = 1; out.sweeps <= max_sweeps; ++out.sweeps) {
    const Eigen::MatrixXd R = Y - dS;
    const Eigen::MatrixXd X = eigen_floor(R, kEigenFloor);
    dS = X - R;
    Eigen::MatrixXd Yn = X;
    Yn.diagonal().setOnes();
    const double change = (Yn - Y).norm();
    Y = std::move(Yn);
    if (change < tol) {
      out.converged = true;
      break;
    }
  }
  // Final cleanup: push the spectrum just above the floor and restore the unit diagonal.
  Eigen::MatrixXd X = eigen_floor(Y, 2.0 * kEigenFloor);
  const Eigen::VectorXd s = X.diagonal().cwiseSqrt().cwiseInverse();
  X = s.asDiagonal() * X * s.asDiagonal();
  X = 0.5 * (X + X.transpose());
  X.diagonal().setOnes();
  out.matrix = std::move(X);
  out.sweeps = std::min(out.sweeps, max_sweeps);
  return out;
}

Eigen::MatrixXd nearest_pd_correlation(const Eigen::MatrixXd& M) {
  return nearest_pd_correlation_ex(M).matrix;
}

double estimate_pi(const Eigen::MatrixXd& R_pearson, double T) {
  if (T < 2) throw DomainError("estimate_pi needs T >= 2");
  double s = 0.0;
  for (Eigen::Index j = 0; j < R_pearson.cols(); ++j)
    for (Eigen::Index i = 0; i < R_pearson.rows(); ++i) s += kernel(R_pearson(i, j), T);
  return s;
}

double estimate_pi(const Eigen::MatrixXd& R_pearson, const Eigen::MatrixXd& counts) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < R_pearson.cols(); ++j)
    for (Eigen::Index i = 0; i < R_pearson.rows(); ++i) s += kernel(R_pearson(i, j), counts(i, j));
  return s;
}

double estimate_gamma(const Eigen::MatrixXd& R_sce, const Eigen::MatrixXd& R_pearson) {
  if (R_sce.rows() != R_pearson.rows() || R_sce.cols() != R_pearson.cols())
    throw DimensionError("matrices differ in shape");
  return (R_sce - R_pearson).squaredNorm();
}

double estimate_rho_upper(const Eigen::MatrixXd& sce_var, const Eigen::MatrixXd& R_pearson, double T) {
  if (T < 2) throw DomainError("estimate_rho_upper needs T >= 2");
  if ((sce_var.array() < 0.0).any()) throw DomainError("variances must be nonnegative");
  double s = 0.0;
  for (Eigen::Index j = 0; j < R_pearson.cols(); ++j)
    for (Eigen::Index i = 0; i < R_pearson.rows(); ++i)
      s += std::sqrt(sce_var(i, j)) * std::sqrt(kernel(R_pearson(i, j), T));
  return s;
}

double estimate_rho_upper(const Eigen::MatrixXd& sce_var, const Eigen::MatrixXd& R_pearson,
                          const Eigen::MatrixXd& counts) {
  if ((sce_var.array() < 0.0).any()) throw DomainError("variances must be nonnegative");
  double s = 0.0;
  for (Eigen::Index j = 0; j < R_pearson.cols(); ++j)
    for (Eigen::Index i = 0; i < R_pearson.rows(); ++i)
      s += std::sqrt(sce_var(i, j)) * std::sqrt(kernel(R_pearson(i, j), counts(i, j)));
  return s;
}

Eigen::MatrixXd sce_variance(const FitResult& fit, const CovariateSet& set) {
  const Eigen::Index d = set.dimension();
  const auto J = correlation_jacobian(fit.theta, evaluate_terms(set, fit.theta.beta, 1));
  const auto p = static_cast<Eigen::Index>(J.size());
  if (p == 0) return Eigen::MatrixXd::Zero(d, d);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(fit.T * fisher_information(fit.theta, set));
  const Eigen::VectorXd& ev = eig.eigenvalues();
  const double cut = 1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  Eigen::VectorXd inv(p);
  for (Eigen::Index i = 0; i < p; ++i) inv(i) = ev(i) > cut ? 1.0 / ev(i) : 0.0;
  const Eigen::MatrixXd C = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index a = 0; a < p; ++a)
    for (Eigen::Index b = 0; b < p; ++b)
      V += C(a, b) * J[static_cast<std::size_t>(a)].cwiseProduct(J[static_cast<std::size_t>(b)]);
  return V.cwiseMax(0.0);
}

const char* to_string(ShrinkMethod m) {
  return m == ShrinkMethod::bootstrap ? "bootstrap" : "closed_form_upper";
}

ShrinkageEstimate lambda_closed_form(double pi, double rho, double gamma, double T) {
  if (T < 1) throw DomainError("T must be at least 1");
  ShrinkageEstimate s;
  s.pi_hat = pi;
  s.rho_hat = rho;
  s.gamma_hat = gamma;
  if (gamma < 1e-12) {
    s.raw_lambda = 0.0;
    s.lambda = 0.0;
    s.clamped = true;
    return s;
  }
  s.raw_lambda = 1.0 - (pi - rho) / (T * gamma);
  s.lambda = std::clamp(s.raw_lambda, 0.0, 1.0);
  s.clamped = s.lambda != s.raw_lambda;
  return s;
}

ShrinkageEstimate shrink_closed_form(const FitResult& fit, const CovariateSet& set,
                                     const StandardizedErrors& errors) {
  const Eigen::MatrixXd P = pearson_type(errors);
  const Eigen::MatrixXd V = sce_variance(fit, set);
  const double T = static_cast<double>(errors.T());
  double pi = 0.0, rho = 0.0;
  const bool complete = errors.complete();
  if (complete) {
    pi = estimate_pi(P, T);
    rho = estimate_rho_upper(V, P, T);
  } else {
    const Eigen::MatrixXd n = overlap_counts(errors.mask);
    pi = estimate_pi(P, n);
    rho = estimate_rho_upper(V, P, n);
  }
  ShrinkageEstimate s = lambda_closed_form(T * pi, T * rho, estimate_gamma(fit.R, P), T);
  s.method = ShrinkMethod::closed_form_upper;
  s.pairwise_kernel = !complete;
  return s;
}

ShrinkageEstimate lambda_bootstrap(const FitResult& fit, const ParameterVector& theta0,
                                   const CovariateSet& set, const StandardizedErrors& errors,
                                   const BootstrapOptions& options) {
  if (options.B < 2) throw DomainError("bootstrap needs B >= 2");
  const Eigen::Index T = errors.T(), d = errors.d();
  const Eigen::MatrixXd P_pd = nearest_pd_correlation(pearson_type(errors));
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(P_pd, Eigen::EigenvaluesOnly);
    if (!(eig.eigenvalues().minCoeff() >= 0.5 * kEigenFloor))
      throw EstimationError("projected Pearson estimate is not positive definite");
  }
  const auto B = static_cast<std::size_t>(options.B);
  std::vector<Eigen::MatrixXd> sce(B), prs(B);
  FitOptions fo;
  fo.max_iterations = options.max_iterations;
  parallel_for(B, options.threads, [&](std::size_t b) {
    Rng rng = make_stream(options.seed, b, "bootstrap");
    Eigen::MatrixXd eps = sample_mvn(P_pd, T, rng);
    StandardizedErrors e;
    if (options.mode == StandardizeMode::unknown) {
      Dataset ds;
      ds.y = eps;
      ds.mask = errors.mask;
      e = standardize(ds, StandardizeMode::unknown);
    } else {
      e.values = eps;
      e.mask = errors.mask;
      for (Eigen::Index t = 0; t < T; ++t)
        for (Eigen::Index i = 0; i < d; ++i)
          if (!e.mask(t, i)) e.values(t, i) = 0.0;
    }
    prs[b] = pearson_type(e);
    sce[b] = fit_sce(e, set, theta0, fo).R;
  });

  const double nB = static_cast<double>(B);
  Eigen::MatrixXd mean_s = Eigen::MatrixXd::Zero(d, d), mean_p = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t b = 0; b < B; ++b) {
    mean_s += sce[b];
    mean_p += prs[b];
  }
  mean_s /= nB;
  mean_p /= nB;
  Eigen::MatrixXd var_p = Eigen::MatrixXd::Zero(d, d), cov_sp = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t b = 0; b < B; ++b) {
    const Eigen::MatrixXd dp = prs[b] - mean_p;
    var_p += dp.cwiseProduct(dp);
    cov_sp += (sce[b] - mean_s).cwiseProduct(dp);
  }
  var_p /= nB - 1.0;
  cov_sp /= nB - 1.0;
  const double Td = static_cast<double>(T);
  const double pi = Td * var_p.sum();
  const double rho = Td * cov_sp.sum();
  const double gamma = (mean_s - P_pd).squaredNorm();
  ShrinkageEstimate s = lambda_closed_form(pi, rho, gamma, Td);
  s.method = ShrinkMethod::bootstrap;
  s.replicates = options.B;
  s.pairwise_kernel = !errors.complete();
  (void)fit;
  return s;
}

Eigen::MatrixXd wsce(const Eigen::MatrixXd& R_sce, const Eigen::MatrixXd& R_pearson_pd, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("lambda must lie in [0, 1]");
  if (R_sce.rows() != R_pearson_pd.rows() || R_sce.cols() != R_pearson_pd.cols())
    throw DimensionError("matrices differ in shape");
  if (lambda == 0.0) return R_sce;
  if (lambda == 1.0) return R_pearson_pd;
  Eigen::MatrixXd W = (1.0 - lambda) * R_sce + lambda * R_pearson_pd;
  W.diagonal().setOnes();
  return W;
}

}  // namespace structcov
