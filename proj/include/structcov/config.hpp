#pragma once

#include "structcov/covstruct.hpp"
#include "structcov/data.hpp"
#include "structcov/mle.hpp"
#include "structcov/sim.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace structcov {

/// Model description read from JSON:
///
///   {
///     "variables": ["a", "b", ...],          optional
///     "components": [
///       {"name": "region", "kind": "cluster", "labels": "region.csv"},
///       {"name": "global", "kind": "global"},
///       {"name": "M", "kind": "matrix", "file": "m.csv"},
///       {"name": "regionxspatial", "kind": "interaction", "parents": ["region", "spatial"]}
///     ],
///     "spatial": {"name": "spatial", "adjacency": "adjacency.csv"},
///     "roster": [...], "beta_grid": [...] or "a:b:n", "mode": "known",
///     "tolerances": {"grad_tol": 1e-6, "max_iterations": 500, "identifiability": 1e-7},
///     "bootstrap": {"B": 100, "seed": 1, "max_iterations": 100},
///     "shrinkage": "auto"
///   }
///
/// Relative paths are resolved against the directory of the JSON file.
struct ModelConfig {
  CovariateSet set;
  std::vector<std::string> ids;
  std::vector<double> beta_grid;
  StandardizeMode mode = StandardizeMode::known;
  FitOptions fit;
  double id_tol = 1e-7;
  int bootstrap_B = 100;
  std::uint64_t bootstrap_seed = 1;
  int bootstrap_max_iterations = 100;
  WsceMethod shrinkage = WsceMethod::automatic;
};

/// Variable ids come from `ids` when given (data header), else from the config's
/// "variables" or "d", else from the first labels file.
[[nodiscard]] ModelConfig load_model_config(const std::string& path,
                                            const std::optional<std::vector<std::string>>& ids = std::nullopt);

/// "a:b:n" -> n equispaced points on [a, b].
[[nodiscard]] std::vector<double> parse_grid(const std::string& spec);

[[nodiscard]] StandardizeMode parse_mode(const std::string& s);
[[nodiscard]] WsceMethod parse_wsce_method(const std::string& s);
[[nodiscard]] ScenarioKind parse_scenario_kind(const std::string& s);
[[nodiscard]] Estimator parse_estimator(const std::string& s);
[[nodiscard]] MissingPattern parse_missing(const std::string& s);

/// Scenario settings from JSON; keys mirror ScenarioConfig field names. Unknown keys are
/// rejected.
[[nodiscard]] ScenarioConfig load_scenario_config(const std::string& path);

}  // namespace structcov
