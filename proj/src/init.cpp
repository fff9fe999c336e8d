#include "structcov/init.hpp"

#include "structcov/error.hpp"
#include "structcov/qp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace structcov {

Eigen::MatrixXd overlap_counts(const Mask& mask) {
  Eigen::MatrixXd m = mask.cast<double>();
  return m.transpose() * m;
}

Eigen::MatrixXd pearson_type(const StandardizedErrors& errors) {
  const Eigen::Index d = errors.d();
  if (errors.mask.rows() != errors.T() || errors.mask.cols() != d)
    throw DimensionError("mask shape differs from the errors");
  Eigen::MatrixXd masked = errors.values;
  for (Eigen::Index t = 0; t < errors.T(); ++t)
    for (Eigen::Index i = 0; i < d; ++i)
      if (!errors.mask(t, i)) masked(t, i) = 0.0;
  const Eigen::MatrixXd n = overlap_counts(errors.mask);
  const Eigen::MatrixXd cross = masked.transpose() * masked;
  Eigen::MatrixXd R = Eigen::MatrixXd::Identity(d, d);
  bool any = false;
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) {
      if (i == j) continue;
      if (n(i, j) < 2) continue;
      any = true;
      R(i, j) = std::clamp(cross(i, j) / (n(i, j) - 1.0), -1.0, 1.0);
    }
  if (!any && d > 1) throw EstimationError("no variable pair has two overlapping observations");
  return R;
}

Eigen::MatrixXd ive(const ParameterVector& theta0, const CovariateSet& set) {
  return assemble_correlation(theta0, set);
}

namespace {

struct GridSolve {
  Eigen::VectorXd w;
  double sq_dist = 0.0;
};

std::vector<Eigen::MatrixXd> weighted_matrices(const CovariateSet& set, const ModelTerms& t) {
  std::vector<Eigen::MatrixXd> mats = t.C;
  if (set.has_spatial()) mats.push_back(t.G);
  return mats;
}

GridSolve solve_at(const std::vector<Eigen::MatrixXd>& mats, const Eigen::MatrixXd& R_hat,
                   const Eigen::VectorXd& lb, double beta_for_message) {
  const auto nw = static_cast<Eigen::Index>(mats.size());
  const double scale = 1.0 / static_cast<double>(R_hat.size());
  Eigen::MatrixXd P(nw, nw);
  Eigen::VectorXd h(nw);
  for (Eigen::Index i = 0; i < nw; ++i) {
    h(i) = mats[static_cast<std::size_t>(i)].cwiseProduct(R_hat).sum() * scale;
    for (Eigen::Index j = 0; j <= i; ++j)
      P(i, j) = P(j, i) =
          mats[static_cast<std::size_t>(i)].cwiseProduct(mats[static_cast<std::size_t>(j)]).sum() * scale;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(P, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() <= 1e-10 * eig.eigenvalues().maxCoeff()) {
    std::ostringstream msg;
    msg << "component matrices are linearly dependent";
    if (!std::isnan(beta_for_message)) msg << " at beta=" << beta_for_message;
    msg << "; run an identifiability check (check-id) on this model";
    throw IdentifiabilityError(msg.str());
  }
  Eigen::MatrixXd CE = Eigen::MatrixXd::Ones(nw, 1);
  Eigen::VectorXd ce = Eigen::VectorXd::Ones(1);
  Eigen::MatrixXd CI = Eigen::MatrixXd::Identity(nw, nw);
  QpResult qp = solve_qp(P, -h, CE, ce, CI, lb);
  GridSolve out;
  out.w = qp.x.cwiseMax(lb);
  out.w /= out.w.sum();
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(R_hat.rows(), R_hat.cols());
  for (Eigen::Index k = 0; k < nw; ++k) R += out.w(k) * mats[static_cast<std::size_t>(k)];
  out.sq_dist = (R - R_hat).squaredNorm();
  return out;
}

Eigen::MatrixXd support(const Eigen::MatrixXd& m) {
  return (m.array().abs() < 1e-12).select(0.0, m.array().abs().ceil()).matrix();
}

}  // namespace

InitResult qp_init(const Eigen::MatrixXd& R_hat, const CovariateSet& set,
                   const std::vector<double>& beta_grid) {
  const Eigen::Index d = set.dimension();
  if (R_hat.rows() != d || R_hat.cols() != d) throw DimensionError("R_hat has the wrong shape");
  if ((R_hat - R_hat.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw DomainError("R_hat must be symmetric");
  if ((R_hat.diagonal().array() - 1.0).abs().maxCoeff() > 1e-10)
    throw DomainError("R_hat must have a unit diagonal");

  const bool spatial = set.depends_on_beta();
  if (spatial && beta_grid.empty()) throw DomainError("beta grid is empty");
  std::vector<std::vector<Eigen::MatrixXd>> mats;
  std::vector<double> betas;
  if (spatial) {
    for (double b : beta_grid) {
      mats.push_back(weighted_matrices(set, evaluate_terms(set, b, 0)));
      betas.push_back(b);
    }
  } else {
    mats.push_back(weighted_matrices(set, evaluate_terms(set, std::nullopt, 0)));
    betas.push_back(std::nan(""));
  }
  const auto nw = static_cast<Eigen::Index>(mats.front().size());
  std::vector<std::string> names;
  for (const auto& c : set.components()) names.push_back(c.name);
  if (set.has_spatial()) names.push_back(set.spatial_name());

  InitResult res;
  Eigen::VectorXd lb = Eigen::VectorXd::Zero(nw);
  GridSolve best;
  std::size_t best_g = 0;
  for (int round = 0;; ++round) {
    if (round > 4 * nw + 10) throw SolverError("initialization did not reach an interior point");
    best = GridSolve{};
    double best_val = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < mats.size(); ++g) {
      GridSolve s = solve_at(mats[g], R_hat, lb, betas[g]);
      if (g == 0 || s.sq_dist < best_val - 1e-12 * (1.0 + std::abs(best_val))) {
        best_val = s.sq_dist;
        best = std::move(s);
        best_g = g;
      }
    }
    std::vector<Eigen::Index> stuck;
    for (Eigen::Index k = 0; k < nw; ++k)
      if (best.w(k) < kWeightFloor - 1e-15) stuck.push_back(k);
    if (stuck.empty()) break;

    const auto& at = mats[best_g];
    std::vector<Eigen::MatrixXd> sup;
    for (const auto& m : at) sup.push_back(support(m));
    for (Eigen::Index n : stuck) {
      Eigen::Index q = -1;
      double q_dist = std::numeric_limits<double>::infinity();
      for (Eigen::Index k = 1; k < nw; ++k) {
        if (k == n) continue;
        const double dist =
            (sup[static_cast<std::size_t>(k)] - sup[static_cast<std::size_t>(n)]).cwiseAbs().sum();
        if (dist < q_dist) {
          q_dist = dist;
          q = k;
        }
      }
      const double from_q = q >= 0 ? best.w(q) / static_cast<double>(nw) : 0.0;
      const double bound = std::max(from_q, kWeightFloor);
      lb(n) = std::max(lb(n), bound);
      res.constraints_added.push_back({names[static_cast<std::size_t>(n)], lb(n)});
    }
  }

  res.theta0 = ParameterVector::from_weights(
      best.w, spatial ? std::optional<double>(betas[best_g]) : std::nullopt);
  res.objective = std::sqrt(best.sq_dist);
  res.grid_index = spatial ? static_cast<int>(best_g) : -1;
  return res;
}

}  // namespace structcov
