#pragma once

#include "structcov/car.hpp"

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace structcov {

enum class ComponentKind { identity, cluster, global, matrix, spatial, interaction };

[[nodiscard]] const char* to_string(ComponentKind kind);

/// A unit-diagonal correlation component F_k.
///
/// Spatial components carry no matrix. An interaction with a spatial parent keeps the
/// non-spatial parent's matrix here and is multiplied by Gamma(beta)^-1 at evaluation time.
struct ComponentMatrix {
  ComponentKind kind = ComponentKind::matrix;
  std::string name;
  Eigen::MatrixXd matrix;
  std::vector<std::string> parents;
  bool spatial_parent = false;

  [[nodiscard]] bool depends_on_beta() const {
    return kind == ComponentKind::spatial || spatial_parent;
  }
};

[[nodiscard]] ComponentMatrix build_cluster_matrix(const std::vector<int>& labels,
                                                   std::string name = "cluster");
[[nodiscard]] ComponentMatrix build_global_matrix(Eigen::Index d, std::string name = "global");
[[nodiscard]] ComponentMatrix identity_component(Eigen::Index d);
[[nodiscard]] ComponentMatrix spatial_component(std::string name = "spatial");

/// Wraps a user-supplied matrix after checking it is a correlation matrix.
[[nodiscard]] ComponentMatrix matrix_component(Eigen::MatrixXd m, std::string name);

/// Entrywise product of two components. At most one parent may be spatial.
[[nodiscard]] ComponentMatrix hadamard_interaction(const ComponentMatrix& a,
                                                   const ComponentMatrix& b,
                                                   std::string name = {});

/// Symmetric, unit diagonal, entries in [-1, 1] and PSD within tolerance; throws otherwise.
void validate_correlation_component(const Eigen::MatrixXd& m, const std::string& name);

/// Ordered roster of components. Index 0 is always the identity, whose weight is the
/// residual of the simplex. The spatial effect, when present, is kept separately since it
/// is weighted by delta and brings the shared beta.
class CovariateSet {
 public:
  CovariateSet() = default;

  /// `components` must not contain the identity; it is prepended. `spatial` may be
  /// omitted when no component depends on the graph.
  CovariateSet(Eigen::Index d, std::vector<ComponentMatrix> components,
               std::optional<SpatialGraph> graph = std::nullopt,
               std::string spatial_name = "spatial");

  [[nodiscard]] Eigen::Index dimension() const { return d_; }
  /// Number of alpha-weighted components including the identity (K + 1).
  [[nodiscard]] std::size_t size() const { return components_.size(); }
  [[nodiscard]] const std::vector<ComponentMatrix>& components() const { return components_; }
  [[nodiscard]] const ComponentMatrix& component(std::size_t k) const { return components_[k]; }

  [[nodiscard]] bool has_spatial() const { return spatial_; }
  [[nodiscard]] const std::string& spatial_name() const { return spatial_name_; }
  [[nodiscard]] const std::optional<SpatialGraph>& graph() const { return graph_; }
  [[nodiscard]] const SpectralGraphCache& spectral() const;
  [[nodiscard]] bool depends_on_beta() const;

  /// Names of the optional terms (everything but the identity) in declaration order,
  /// with the spatial effect placed where it was declared.
  [[nodiscard]] const std::vector<std::string>& roster() const { return roster_; }

  /// Free coordinates in the order used by gradients and Fisher information:
  /// alpha_1..alpha_K, then delta and beta if spatial.
  [[nodiscard]] std::vector<std::string> free_names() const;
  [[nodiscard]] std::size_t free_count() const {
    return components_.size() - 1 + (spatial_ ? 2 : 0);
  }

  /// Sub-model keeping the identity plus the named terms. Interactions require both
  /// parents to be kept; violations raise DomainError.
  [[nodiscard]] CovariateSet restrict(const std::vector<std::string>& names) const;

  /// Position of a term in roster(), or -1.
  [[nodiscard]] int roster_index(const std::string& name) const;

  /// Keeps the spatial slot in roster order; used when building from config.
  void set_roster(std::vector<std::string> roster);

 private:
  Eigen::Index d_ = 0;
  std::vector<ComponentMatrix> components_;
  std::optional<SpatialGraph> graph_;
  std::shared_ptr<const SpectralGraphCache> cache_;
  bool spatial_ = false;
  std::string spatial_name_ = "spatial";
  std::vector<std::string> roster_;

  [[nodiscard]] int component_index(const std::string& name) const;
};

/// (alpha_0..alpha_K, delta, beta). alpha_0 is the identity weight.
struct ParameterVector {
  Eigen::VectorXd alpha;
  std::optional<double> delta;
  std::optional<double> beta;

  /// Linear weights alpha_0..alpha_K followed by delta when present.
  [[nodiscard]] Eigen::VectorXd weights() const;
  [[nodiscard]] static ParameterVector from_weights(const Eigen::VectorXd& w,
                                                    std::optional<double> beta);
  /// Free coordinates (alpha_1..alpha_K, delta, beta).
  [[nodiscard]] Eigen::VectorXd free() const;
};

/// Throws unless the vector matches the set and satisfies positivity and the simplex.
void validate_parameters(const ParameterVector& theta, const CovariateSet& set);

/// Component matrices at a fixed beta, with the beta-derivatives that the likelihood needs.
struct ModelTerms {
  std::vector<Eigen::MatrixXd> C;   // alpha-weighted components at beta
  std::vector<Eigen::MatrixXd> dC;  // d/dbeta, empty matrix when constant
  std::vector<Eigen::MatrixXd> d2C;
  Eigen::MatrixXd G, dG, d2G;       // spatial correlation and derivatives (empty if none)
};

[[nodiscard]] ModelTerms evaluate_terms(const CovariateSet& set, std::optional<double> beta,
                                        int order);

[[nodiscard]] Eigen::MatrixXd assemble_correlation(const ParameterVector& theta,
                                                   const CovariateSet& set);
[[nodiscard]] Eigen::MatrixXd assemble_correlation(const ParameterVector& theta,
                                                   const ModelTerms& terms);

/// dR/dbeta at theta for the given terms.
[[nodiscard]] Eigen::MatrixXd correlation_dbeta(const ParameterVector& theta,
                                                const ModelTerms& terms);

/// dR/dtheta_i over the free coordinates, in free_names() order.
[[nodiscard]] std::vector<Eigen::MatrixXd> correlation_jacobian(const ParameterVector& theta,
                                                                const ModelTerms& terms);

}  // namespace structcov
