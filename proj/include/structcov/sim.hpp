#pragma once

#include "structcov/car.hpp"
#include "structcov/covstruct.hpp"
#include "structcov/data.hpp"
#include "structcov/rng.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace structcov {

/// Each upper-triangle pair is an edge independently with probability p.
[[nodiscard]] SpatialGraph erdos_renyi(Eigen::Index d, double p, Rng& rng);

/// i.i.d. categorical labels with the given class probabilities.
[[nodiscard]] std::vector<int> multinomial_membership(Eigen::Index d, const std::vector<double>& probs,
                                                      Rng& rng);

/// xi * R_model + (1 - xi) (0.01 I + 0.99 F_miss). Here xi is the weight on the model, so
/// xi = 1 leaves R_model unchanged.
[[nodiscard]] Eigen::MatrixXd mix_misspecification(const Eigen::MatrixXd& R_model,
                                                   const Eigen::MatrixXd& F_miss, double xi);

/// (1/d^2) sum_ij |R_true - R_est|.
[[nodiscard]] double mae(const Eigen::MatrixXd& R_true, const Eigen::MatrixXd& R_est);

/// Ledoit-Wolf shrinkage of the centered sample covariance toward a scaled identity,
/// rescaled to unit diagonal. Requires complete data.
[[nodiscard]] Eigen::MatrixXd ledoit_wolf(const StandardizedErrors& errors);

/// Staggered-start mask: a `fraction` of variables start observed at a uniform time in
/// 1..max_delay and stay observed afterwards. Every variable keeps at least two rows.
[[nodiscard]] Mask monotone_mask(Eigen::Index T, Eigen::Index d, double fraction, int max_delay,
                                 Rng& rng);

/// Covariates of the frozen synthetic stand-in for real country data: 195 nodes ordered so
/// that the first 14, 32, 65, 115 nodes form cumulative macro-regions. Taking the first d
/// nodes gives a nested family of layouts.
struct StructuredLayout {
  std::vector<int> colonizer;
  std::vector<int> region;
  SpatialGraph graph;
};

inline constexpr Eigen::Index kStructuredNodes = 195;

[[nodiscard]] StructuredLayout structured_layout(Eigen::Index d);

enum class ScenarioKind { fss, structured };
enum class Estimator { pearson, ledoit_wolf, ive, sce, wsce };
enum class MissingPattern { none, monotone, custom };
enum class WsceMethod { automatic, closed_form, bootstrap };

[[nodiscard]] const char* to_string(ScenarioKind k);
[[nodiscard]] const char* to_string(Estimator e);
[[nodiscard]] const char* to_string(MissingPattern m);
[[nodiscard]] const char* to_string(WsceMethod m);

[[nodiscard]] std::vector<Estimator> all_estimators();

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::fss;
  Eigen::Index d = 200;
  Eigen::Index T = 11;
  /// Weights (identity, comcol, region, global, delta) and beta. Defaults per kind.
  std::optional<ParameterVector> theta_star;
  /// 0: data follow the model; 1: correlation driven only by an unobserved covariate.
  double xi = 0.0;
  MissingPattern missing = MissingPattern::none;
  double missing_fraction = 0.3;
  int missing_max_delay = 0;  // 0: T / 3
  std::optional<Mask> custom_mask;
  bool known_musigma = true;
  std::uint64_t seed = 1;
  int reps = 1;
  std::size_t threads = 1;
  std::vector<Estimator> estimators = all_estimators();
  WsceMethod wsce_method = WsceMethod::automatic;
  int bootstrap_B = 100;
  int bootstrap_max_iterations = 100;
  std::vector<double> beta_grid;  // empty: the default grid
};

[[nodiscard]] ParameterVector default_theta(ScenarioKind kind);

/// Throws DomainError for invalid sizes, weights or mixing weight.
void validate_config(const ScenarioConfig& config);

/// Structures and data for one replicate.
struct SimulatedReplicate {
  CovariateSet set;
  ParameterVector theta_star;
  Eigen::MatrixXd R_true;
  Dataset data;
  StandardizedErrors errors;
};

[[nodiscard]] SimulatedReplicate simulate_replicate(const ScenarioConfig& config, int replicate);

struct ReplicateResult {
  int replicate = 0;
  std::vector<double> mae;      // aligned with BenchmarkReport::estimators
  std::vector<double> seconds;  // wall time per estimator, not reproducible
  double lambda = -1.0;         // -1 when the WSCE was not computed
  bool sce_converged = true;
  int sce_iterations = 0;
  std::optional<ParameterVector> theta_hat;
};

struct BenchmarkReport {
  ScenarioConfig config;
  std::vector<Estimator> estimators;
  std::vector<ReplicateResult> replicates;
  std::vector<std::string> notes;

  [[nodiscard]] std::vector<double> mae_of(Estimator e) const;
};

[[nodiscard]] BenchmarkReport run_benchmark(const ScenarioConfig& config);

}  // namespace structcov
