#pragma once

#include "structcov/covstruct.hpp"
#include "structcov/data.hpp"
#include "structcov/mle.hpp"

#include <optional>
#include <string>
#include <vector>

namespace structcov {

/// Every admissible sub-model: subsets of roster() that keep both parents of each kept
/// interaction, excluding the identity-only model. Ordered by the bitmask with bit i set
/// when roster()[i] is kept, so {A}, {B}, {A,B}, {A,B,AxB} for the roster {A, B, AxB}.
[[nodiscard]] std::vector<std::vector<std::string>> enumerate_models(const CovariateSet& set);

/// Full Gaussian log-likelihood of the standardized errors, sum over observed entries.
[[nodiscard]] double total_loglik(const FitResult& fit);

/// -2 log L + (n_terms + G * spatial) log T. n_terms counts non-identity terms, with the
/// spatial effect counted once for delta.
[[nodiscard]] double bic(double loglik, std::size_t n_terms, bool spatial, double T, int G = 1);
[[nodiscard]] double bic(const FitResult& fit, const CovariateSet& model, int G = 1);

struct ModelCandidate {
  std::vector<std::string> terms;
  double bic = 0.0;
  double centered_bic = 0.0;
  std::optional<FitResult> fit;
  bool converged = false;
  std::string error;  // set when the candidate could not be fitted
  std::size_t enumeration_index = 0;
};

struct SelectOptions {
  std::vector<double> beta_grid;  // empty: the default grid
  FitOptions fit;
  int G = 1;
  std::size_t threads = 1;
};

struct SelectionReport {
  std::vector<ModelCandidate> ranking;  // ascending BIC, failed candidates last
  std::vector<std::string> reference;   // model the centered BICs are relative to
};

/// Fits every enumerated model from its least-squares start and ranks by BIC, breaking
/// ties by enumeration order. BICs are centered at the model with all non-interaction
/// terms, or at the best model when that one is unavailable.
[[nodiscard]] SelectionReport select_best(const StandardizedErrors& errors, const CovariateSet& set,
                                          const SelectOptions& options = {});

struct Effect {
  std::string name;
  ComponentKind kind = ComponentKind::matrix;
  double value = 0.0;
  std::size_t pairs = 0;  // pairs averaged over; 0 for direct weights
};

/// Direct weights for non-spatial terms; for the spatial effect the mean of
/// delta * Gamma(beta)^-1 over neighbor pairs, and for spatial interactions the mean of
/// alpha_k (F_k o Gamma(beta)^-1) over neighbor pairs with F_k = 1.
[[nodiscard]] std::vector<Effect> average_effects(const ParameterVector& theta, const CovariateSet& set);

}  // namespace structcov
