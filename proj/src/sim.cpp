#include "structcov/sim.hpp"

#include "structcov/error.hpp"
#include "structcov/identify.hpp"
#include "structcov/init.hpp"
#include "structcov/mle.hpp"
#include "structcov/parallel.hpp"
#include "structcov/shrink.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace structcov {

SpatialGraph erdos_renyi(Eigen::Index d, double p, Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("edge probability must lie in [0, 1]");
  std::bernoulli_distribution edge(p);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i + 1; j < d; ++j)
      if (edge(rng)) M(i, j) = M(j, i) = 1.0;
  return SpatialGraph(std::move(M));
}

std::vector<int> multinomial_membership(Eigen::Index d, const std::vector<double>& probs, Rng& rng) {
  if (probs.empty()) throw DomainError("no class probabilities");
  double s = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw DomainError("class probabilities must be nonnegative");
    s += p;
  }
  if (std::abs(s - 1.0) > 1e-9) throw DomainError("class probabilities must sum to 1");
  std::discrete_distribution<int> cat(probs.begin(), probs.end());
  std::vector<int> labels(static_cast<std::size_t>(d));
  for (auto& l : labels) l = cat(rng);
  return labels;
}

Eigen::MatrixXd mix_misspecification(const Eigen::MatrixXd& R_model, const Eigen::MatrixXd& F_miss,
                                     double xi) {
  if (R_model.rows() != F_miss.rows() || R_model.cols() != F_miss.cols())
    throw DimensionError("matrices differ in shape");
  if (!(xi >= 0.0 && xi <= 1.0)) throw DomainError("mixing weight must lie in [0, 1]");
  const Eigen::Index d = R_model.rows();
  Eigen::MatrixXd R_tilde = 0.01 * Eigen::MatrixXd::Identity(d, d) + 0.99 * F_miss;
  Eigen::MatrixXd out = xi * R_model + (1.0 - xi) * R_tilde;
  out.diagonal().setOnes();
  return out;
}

double mae(const Eigen::MatrixXd& R_true, const Eigen::MatrixXd& R_est) {
  if (R_true.rows() != R_est.rows() || R_true.cols() != R_est.cols())
    throw DimensionError("matrices differ in shape");
  if (R_true.size() == 0) return 0.0;
  return (R_true - R_est).cwiseAbs().sum() / static_cast<double>(R_true.size());
}

Eigen::MatrixXd ledoit_wolf(const StandardizedErrors& errors) {
  if (!errors.complete()) throw InputError("Ledoit-Wolf needs complete data");
  const Eigen::Index T = errors.T(), d = errors.d();
  if (T < 1) throw DomainError("Ledoit-Wolf needs at least one sample");
  const Eigen::RowVectorXd mean = errors.values.colwise().mean();
  const Eigen::MatrixXd X = errors.values.rowwise() - mean;
  const double Td = static_cast<double>(T), dd = static_cast<double>(d);
  const Eigen::MatrixXd S = X.transpose() * X / Td;
  const double m = S.trace() / dd;
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
  const double d2 = (S - m * I).squaredNorm() / dd;
  double b2bar = 0.0;
  for (Eigen::Index t = 0; t < T; ++t) {
    const Eigen::VectorXd x = X.row(t).transpose();
    b2bar += (x * x.transpose() - S).squaredNorm() / dd;
  }
  b2bar /= Td * Td;
  const double shrink = d2 > 0.0 ? std::min(b2bar, d2) / d2 : 1.0;
  if (m <= 0.0) return I;
  Eigen::MatrixXd Sigma = shrink * m * I + (1.0 - shrink) * S;
  const Eigen::VectorXd s = Sigma.diagonal().cwiseSqrt().cwiseInverse();
  Sigma = s.asDiagonal() * Sigma * s.asDiagonal();
  Sigma.diagonal().setOnes();
  return Sigma;
}

Mask monotone_mask(Eigen::Index T, Eigen::Index d, double fraction, int max_delay, Rng& rng) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw DomainError("missing fraction must lie in [0, 1]");
  if (max_delay < 0) throw DomainError("delay must be nonnegative");
  Mask mask = Mask::Constant(T, d, true);
  const int cap = std::min<int>(max_delay, static_cast<int>(T) - 2);
  if (cap < 1) return mask;
  std::bernoulli_distribution late(fraction);
  std::uniform_int_distribution<int> start(1, cap);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (!late(rng)) continue;
    const int s = start(rng);
    for (Eigen::Index t = 0; t < s; ++t) mask(t, i) = false;
  }
  return mask;
}

StructuredLayout structured_layout(Eigen::Index d) {
  if (d < 2 || d > kStructuredNodes)
    throw DomainError("structured layout supports 2 to " + std::to_string(kStructuredNodes) + " nodes");
  static const StructuredLayout full = [] {
    const std::vector<int> macro_sizes{14, 18, 33, 50, 80};
    Rng rng = make_stream(20240611, 0, "structured-layout");
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto n = static_cast<std::size_t>(kStructuredNodes);
    std::vector<double> x(n), y(n);
    std::vector<int> colonizer(n), region(n);
    std::size_t pos = 0;
    int next_region = 0;
    int next_singleton = 100;
    for (std::size_t m = 0; m < macro_sizes.size(); ++m) {
      const auto sz = static_cast<std::size_t>(macro_sizes[m]);
      std::vector<std::size_t> idx(sz);
      std::iota(idx.begin(), idx.end(), pos);
      for (auto i : idx) {
        x[i] = static_cast<double>(m) + u(rng);
        y[i] = u(rng);
      }
      // Sub-regions of about ten nodes, contiguous in the y direction.
      std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return y[a] < y[b]; });
      const std::size_t groups = std::max<std::size_t>(1, (sz + 5) / 10);
      for (std::size_t k = 0; k < sz; ++k) region[idx[k]] = next_region + static_cast<int>(k * groups / sz);
      next_region += static_cast<int>(groups);
      // Colonial ties: five shared colonizers with region-dependent weights, else none.
      std::vector<double> w{1.0, 1.0, 1.0, 1.0, 1.0};
      w[m % 5] += 3.0;
      std::discrete_distribution<int> col(w.begin(), w.end());
      for (auto i : idx) colonizer[i] = u(rng) < 0.3 ? next_singleton++ : col(rng);
      pos += sz;
    }
    // Three nearest neighbors of each node, symmetrized.
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(kStructuredNodes, kStructuredNodes);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::pair<double, std::size_t>> dist;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) dist.emplace_back(std::hypot(x[i] - x[j], y[i] - y[j]), j);
      std::partial_sort(dist.begin(), dist.begin() + 3, dist.end());
      for (int k = 0; k < 3; ++k) {
        const auto j = static_cast<Eigen::Index>(dist[static_cast<std::size_t>(k)].second);
        M(static_cast<Eigen::Index>(i), j) = M(j, static_cast<Eigen::Index>(i)) = 1.0;
      }
    }
    return StructuredLayout{colonizer, region, SpatialGraph(M)};
  }();
  const auto n = static_cast<std::size_t>(d);
  return StructuredLayout{std::vector<int>(full.colonizer.begin(), full.colonizer.begin() + static_cast<long>(n)),
                          std::vector<int>(full.region.begin(), full.region.begin() + static_cast<long>(n)),
                          SpatialGraph(full.graph.adjacency().topLeftCorner(d, d))};
}

const char* to_string(ScenarioKind k) { return k == ScenarioKind::fss ? "fss" : "structured"; }

const char* to_string(Estimator e) {
  switch (e) {
    case Estimator::pearson: return "pearson";
    case Estimator::ledoit_wolf: return "ledoit_wolf";
    case Estimator::ive: return "ive";
    case Estimator::sce: return "sce";
    case Estimator::wsce: return "wsce";
  }
  return "?";
}

const char* to_string(MissingPattern m) {
  switch (m) {
    case MissingPattern::none: return "none";
    case MissingPattern::monotone: return "monotone";
    case MissingPattern::custom: return "custom";
  }
  return "?";
}

const char* to_string(WsceMethod m) {
  switch (m) {
    case WsceMethod::automatic: return "auto";
    case WsceMethod::closed_form: return "closed_form";
    case WsceMethod::bootstrap: return "bootstrap";
  }
  return "?";
}

std::vector<Estimator> all_estimators() {
  return {Estimator::pearson, Estimator::ledoit_wolf, Estimator::ive, Estimator::sce, Estimator::wsce};
}

ParameterVector default_theta(ScenarioKind kind) {
  Eigen::VectorXd w(5);
  if (kind == ScenarioKind::fss) {
    w << 0.01, 0.05, 0.09, 0.11, 0.74;
    return ParameterVector::from_weights(w, 0.982);
  }
  w << 0.74, 0.11, 0.05, 0.09, 0.01;
  return ParameterVector::from_weights(w, 0.35);
}

void validate_config(const ScenarioConfig& c) {
  if (c.d < 2) throw DomainError("d must be at least 2");
  if (c.T < 1) throw DomainError("T must be at least 1");
  if (c.kind == ScenarioKind::structured && c.d > kStructuredNodes)
    throw DomainError("structured scenario supports at most " + std::to_string(kStructuredNodes) + " variables");
  if (!(c.xi >= 0.0 && c.xi <= 1.0)) throw DomainError("xi must lie in [0, 1]");
  if (c.reps < 0) throw DomainError("reps must be nonnegative");
  if (c.bootstrap_B < 2) throw DomainError("bootstrap needs B >= 2");
  if (c.theta_star) {
    const auto& th = *c.theta_star;
    if (th.alpha.size() != 4 || !th.delta || !th.beta)
      throw DomainError("scenario parameters need 4 alpha weights, delta and beta");
  }
  if (c.missing == MissingPattern::custom) {
    if (!c.custom_mask) throw InputError("custom missing pattern needs a mask");
    if (c.custom_mask->rows() != c.T || c.custom_mask->cols() != c.d)
      throw DimensionError("mask shape differs from (T, d)");
  }
}

SimulatedReplicate simulate_replicate(const ScenarioConfig& config, int replicate) {
  validate_config(config);
  const Eigen::Index d = config.d, T = config.T;
  const auto rep = static_cast<std::uint64_t>(replicate);
  std::vector<int> comcol, region;
  std::optional<SpatialGraph> graph;
  if (config.kind == ScenarioKind::fss) {
    Rng rc = make_stream(config.seed, rep, "comcol");
    Rng rr = make_stream(config.seed, rep, "region");
    Rng rg = make_stream(config.seed, rep, "graph");
    comcol = multinomial_membership(d, std::vector<double>(3, 1.0 / 3.0), rc);
    region = multinomial_membership(d, std::vector<double>(10, 0.1), rr);
    graph = erdos_renyi(d, std::log(static_cast<double>(d)) / static_cast<double>(d), rg);
  } else {
    auto layout = structured_layout(d);
    comcol = std::move(layout.colonizer);
    region = std::move(layout.region);
    graph = std::move(layout.graph);
  }
  CovariateSet set(d,
                   {build_cluster_matrix(comcol, "comcol"), build_cluster_matrix(region, "region"),
                    build_global_matrix(d, "global")},
                   std::move(graph));
  ParameterVector theta = config.theta_star ? *config.theta_star : default_theta(config.kind);
  validate_parameters(theta, set);
  Eigen::MatrixXd R = assemble_correlation(theta, set);
  if (config.xi > 0.0) {
    Rng rm = make_stream(config.seed, rep, "misspecification");
    auto F = build_cluster_matrix(multinomial_membership(d, std::vector<double>(3, 1.0 / 3.0), rm), "miss");
    R = mix_misspecification(R, F.matrix, 1.0 - config.xi);
  }

  Rng rd = make_stream(config.seed, rep, "data");
  Dataset data;
  data.y = sample_mvn(R, T, rd);
  data.mask = Mask::Constant(T, d, true);
  if (config.missing == MissingPattern::monotone) {
    Rng rk = make_stream(config.seed, rep, "mask");
    const int delay = config.missing_max_delay > 0 ? config.missing_max_delay : static_cast<int>(T / 3);
    data.mask = monotone_mask(T, d, config.missing_fraction, delay, rk);
  } else if (config.missing == MissingPattern::custom) {
    data.mask = *config.custom_mask;
  }
  for (Eigen::Index t = 0; t < T; ++t)
    for (Eigen::Index i = 0; i < d; ++i)
      if (!data.mask(t, i)) data.y(t, i) = 0.0;
  StandardizedErrors errors;
  if (config.known_musigma) {
    data.mu = Eigen::MatrixXd::Zero(T, d);
    data.sigma = Eigen::MatrixXd::Ones(T, d);
    errors = standardize(data, StandardizeMode::known);
  } else {
    errors = standardize(data, StandardizeMode::unknown);
  }
  return {std::move(set), std::move(theta), std::move(R), std::move(data), std::move(errors)};
}

std::vector<double> BenchmarkReport::mae_of(Estimator e) const {
  const auto it = std::find(estimators.begin(), estimators.end(), e);
  if (it == estimators.end()) throw DomainError(std::string("estimator not in report: ") + to_string(e));
  const auto k = static_cast<std::size_t>(it - estimators.begin());
  std::vector<double> out;
  out.reserve(replicates.size());
  for (const auto& r : replicates) out.push_back(r.mae[k]);
  return out;
}

BenchmarkReport run_benchmark(const ScenarioConfig& config) {
  validate_config(config);
  BenchmarkReport report;
  report.config = config;
  const bool masked = config.missing != MissingPattern::none;
  for (auto e : config.estimators) {
    if (std::find(report.estimators.begin(), report.estimators.end(), e) != report.estimators.end()) continue;
    if (e == Estimator::ledoit_wolf && masked) {
      report.notes.push_back("ledoit_wolf skipped: it needs complete data");
      continue;
    }
    report.estimators.push_back(e);
  }
  auto wants = [&](Estimator e) {
    return std::find(report.estimators.begin(), report.estimators.end(), e) != report.estimators.end();
  };
  const bool need_fit = wants(Estimator::sce) || wants(Estimator::wsce);
  const bool need_init = need_fit || wants(Estimator::ive);
  const auto grid = config.beta_grid.empty() ? default_beta_grid() : config.beta_grid;
  WsceMethod method = config.wsce_method;
  if (method == WsceMethod::automatic)
    method = config.known_musigma && !masked ? WsceMethod::closed_form : WsceMethod::bootstrap;

  report.replicates.resize(static_cast<std::size_t>(config.reps));
  parallel_for(report.replicates.size(), config.threads, [&](std::size_t r) {
    using clock = std::chrono::steady_clock;
    auto sim = simulate_replicate(config, static_cast<int>(r));
    ReplicateResult& out = report.replicates[r];
    out.replicate = static_cast<int>(r);
    out.mae.assign(report.estimators.size(), 0.0);
    out.seconds.assign(report.estimators.size(), 0.0);
    auto record = [&](Estimator e, const Eigen::MatrixXd& R_est, clock::time_point t0) {
      const auto k = static_cast<std::size_t>(
          std::find(report.estimators.begin(), report.estimators.end(), e) - report.estimators.begin());
      out.mae[k] = mae(sim.R_true, R_est);
      out.seconds[k] += std::chrono::duration<double>(clock::now() - t0).count();
    };

    auto t0 = clock::now();
    const Eigen::MatrixXd P = pearson_type(sim.errors);
    if (wants(Estimator::pearson)) record(Estimator::pearson, P, t0);
    if (wants(Estimator::ledoit_wolf)) {
      t0 = clock::now();
      record(Estimator::ledoit_wolf, ledoit_wolf(sim.errors), t0);
    }
    if (!need_init) return;
    t0 = clock::now();
    const auto init = qp_init(P, sim.set, grid);
    if (wants(Estimator::ive)) record(Estimator::ive, ive(init.theta0, sim.set), t0);
    if (!need_fit) return;
    t0 = clock::now();
    const auto fit = fit_sce(sim.errors, sim.set, init.theta0);
    out.sce_converged = fit.converged;
    out.sce_iterations = fit.iterations;
    out.theta_hat = fit.theta;
    if (wants(Estimator::sce)) record(Estimator::sce, fit.R, t0);
    if (!wants(Estimator::wsce)) return;
    t0 = clock::now();
    ShrinkageEstimate s;
    if (method == WsceMethod::closed_form) {
      s = shrink_closed_form(fit, sim.set, sim.errors);
    } else {
      BootstrapOptions bo;
      bo.B = config.bootstrap_B;
      bo.seed = make_stream(config.seed, r, "bootstrap-seed")();
      bo.max_iterations = config.bootstrap_max_iterations;
      bo.mode = config.known_musigma ? StandardizeMode::known : StandardizeMode::unknown;
      s = lambda_bootstrap(fit, init.theta0, sim.set, sim.errors, bo);
    }
    out.lambda = s.lambda;
    record(Estimator::wsce, wsce(fit.R, nearest_pd_correlation(P), s.lambda), t0);
  });
  return report;
}

}  // namespace structcov
