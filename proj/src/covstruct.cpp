#include "structcov/covstruct.hpp"

#include "structcov/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace structcov {

const char* to_string(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::identity: return "identity";
    case ComponentKind::cluster: return "cluster";
    case ComponentKind::global: return "global";
    case ComponentKind::matrix: return "matrix";
    case ComponentKind::spatial: return "spatial";
    case ComponentKind::interaction: return "interaction";
  }
  return "unknown";
}

void validate_correlation_component(const Eigen::MatrixXd& m, const std::string& name) {
  if (m.rows() != m.cols()) throw DimensionError("component '" + name + "' is not square");
  if (m.rows() < 2) throw DimensionError("component '" + name + "' needs d >= 2");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 2e-12)
    throw DomainError("component '" + name + "' is not symmetric");
  if ((m.diagonal().array() - 1.0).abs().maxCoeff() > 1e-12)
    throw DomainError("component '" + name + "' does not have a unit diagonal");
  if (m.cwiseAbs().maxCoeff() > 1.0 + 1e-12)
    throw DomainError("component '" + name + "' has entries outside [-1, 1]");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-8)
    throw DomainError("component '" + name + "' is not positive semidefinite");
}

ComponentMatrix build_cluster_matrix(const std::vector<int>& labels, std::string name) {
  const auto d = static_cast<Eigen::Index>(labels.size());
  if (d == 0) throw DimensionError("cluster labels are empty");
  if (d < 2) throw DimensionError("cluster covariate needs at least 2 variables");
  for (int l : labels)
    if (l < 0) throw DomainError("cluster labels must be nonnegative");
  ComponentMatrix c;
  c.kind = ComponentKind::cluster;
  c.name = std::move(name);
  c.matrix.resize(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) c.matrix(i, j) = labels[i] == labels[j] ? 1.0 : 0.0;
  return c;
}

ComponentMatrix build_global_matrix(Eigen::Index d, std::string name) {
  if (d < 2) throw DimensionError("global component needs d >= 2");
  ComponentMatrix c;
  c.kind = ComponentKind::global;
  c.name = std::move(name);
  c.matrix = Eigen::MatrixXd::Ones(d, d);
  return c;
}

ComponentMatrix identity_component(Eigen::Index d) {
  ComponentMatrix c;
  c.kind = ComponentKind::identity;
  c.name = "identity";
  c.matrix = Eigen::MatrixXd::Identity(d, d);
  return c;
}

ComponentMatrix spatial_component(std::string name) {
  ComponentMatrix c;
  c.kind = ComponentKind::spatial;
  c.name = std::move(name);
  return c;
}

ComponentMatrix matrix_component(Eigen::MatrixXd m, std::string name) {
  if (m.rows() != m.cols()) throw DimensionError("component '" + name + "' is not square");
  Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  if ((sym - m).cwiseAbs().maxCoeff() >= 1e-12)
    throw DomainError("component '" + name + "' is not symmetric");
  validate_correlation_component(sym, name);
  ComponentMatrix c;
  c.kind = ComponentKind::matrix;
  c.name = std::move(name);
  c.matrix = std::move(sym);
  return c;
}

ComponentMatrix hadamard_interaction(const ComponentMatrix& a, const ComponentMatrix& b,
                                     std::string name) {
  const bool sa = a.kind == ComponentKind::spatial;
  const bool sb = b.kind == ComponentKind::spatial;
  if (sa && sb) throw DomainError("interaction of two spatial components is not supported");
  if (a.spatial_parent || b.spatial_parent)
    throw DomainError("interactions of spatial interactions are not supported");
  ComponentMatrix c;
  c.kind = ComponentKind::interaction;
  c.name = name.empty() ? a.name + "x" + b.name : std::move(name);
  c.parents = {a.name, b.name};
  if (sa || sb) {
    c.spatial_parent = true;
    c.matrix = sa ? b.matrix : a.matrix;
    return c;
  }
  if (a.matrix.rows() != b.matrix.rows() || a.matrix.cols() != b.matrix.cols())
    throw DimensionError("interaction parents '" + a.name + "' and '" + b.name +
                         "' differ in dimension");
  c.matrix = a.matrix.cwiseProduct(b.matrix);
  return c;
}

CovariateSet::CovariateSet(Eigen::Index d, std::vector<ComponentMatrix> components,
                           std::optional<SpatialGraph> graph, std::string spatial_name)
    : d_(d), graph_(std::move(graph)), spatial_name_(std::move(spatial_name)) {
  if (d < 2) throw DimensionError("dimension must be at least 2");
  components_.push_back(identity_component(d));
  std::set<std::string> names{"identity"};
  if (graph_) {
    if (graph_->size() != d) throw DimensionError("spatial graph dimension differs from d");
    spatial_ = true;
    names.insert(spatial_name_);
    cache_ = std::make_shared<const SpectralGraphCache>(decompose(*graph_));
  }
  for (auto& c : components) {
    if (c.kind == ComponentKind::identity)
      throw DomainError("the identity component is implicit and must not be listed");
    if (c.kind == ComponentKind::spatial)
      throw DomainError("spatial effect is declared through the graph, not as a component");
    if (!names.insert(c.name).second) throw DomainError("duplicate component name '" + c.name + "'");
    if (c.matrix.rows() != d || c.matrix.cols() != d)
      throw DimensionError("component '" + c.name + "' has wrong dimension");
    if (c.spatial_parent && !graph_)
      throw DomainError("component '" + c.name + "' interacts with a missing spatial effect");
    for (const auto& p : c.parents)
      if (!names.count(p))
        throw DomainError("interaction '" + c.name + "' references unknown parent '" + p + "'");
    roster_.push_back(c.name);
    components_.push_back(std::move(c));
  }
  if (spatial_) {
    // Spatial goes before the first interaction so main effects come first.
    auto it = std::find_if(roster_.begin(), roster_.end(), [&](const std::string& n) {
      return components_[static_cast<std::size_t>(component_index(n))].kind ==
             ComponentKind::interaction;
    });
    roster_.insert(it, spatial_name_);
  }
}

int CovariateSet::component_index(const std::string& name) const {
  for (std::size_t k = 0; k < components_.size(); ++k)
    if (components_[k].name == name) return static_cast<int>(k);
  return -1;
}

const SpectralGraphCache& CovariateSet::spectral() const {
  if (!cache_) throw DomainError("covariate set has no spatial graph");
  return *cache_;
}

bool CovariateSet::depends_on_beta() const {
  if (spatial_) return true;
  return std::any_of(components_.begin(), components_.end(),
                     [](const ComponentMatrix& c) { return c.spatial_parent; });
}

std::vector<std::string> CovariateSet::free_names() const {
  std::vector<std::string> out;
  for (std::size_t k = 1; k < components_.size(); ++k) out.push_back(components_[k].name);
  if (spatial_) {
    out.push_back(spatial_name_);
    out.push_back("beta");
  }
  return out;
}

int CovariateSet::roster_index(const std::string& name) const {
  auto it = std::find(roster_.begin(), roster_.end(), name);
  return it == roster_.end() ? -1 : static_cast<int>(it - roster_.begin());
}

void CovariateSet::set_roster(std::vector<std::string> roster) {
  auto a = roster, b = roster_;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) throw DomainError("roster must be a permutation of the declared terms");
  roster_ = std::move(roster);
}

CovariateSet CovariateSet::restrict(const std::vector<std::string>& names) const {
  std::set<std::string> keep(names.begin(), names.end());
  for (const auto& n : keep)
    if (roster_index(n) < 0) throw DomainError("unknown term '" + n + "'");
  CovariateSet out;
  out.d_ = d_;
  out.graph_ = graph_;
  out.cache_ = cache_;
  out.spatial_name_ = spatial_name_;
  out.spatial_ = spatial_ && keep.count(spatial_name_) > 0;
  out.components_.push_back(components_.front());
  for (std::size_t k = 1; k < components_.size(); ++k) {
    const auto& c = components_[k];
    if (!keep.count(c.name)) continue;
    for (const auto& p : c.parents)
      if (!keep.count(p))
        throw DomainError("interaction '" + c.name + "' requires parent '" + p + "'");
    out.components_.push_back(c);
  }
  for (const auto& n : roster_)
    if (keep.count(n)) out.roster_.push_back(n);
  if (!out.depends_on_beta()) {
    out.graph_.reset();
    out.cache_.reset();
  }
  return out;
}

Eigen::VectorXd ParameterVector::weights() const {
  Eigen::VectorXd w(alpha.size() + (delta ? 1 : 0));
  w.head(alpha.size()) = alpha;
  if (delta) w(alpha.size()) = *delta;
  return w;
}

ParameterVector ParameterVector::from_weights(const Eigen::VectorXd& w,
                                              std::optional<double> beta) {
  ParameterVector p;
  if (beta) {
    p.alpha = w.head(w.size() - 1);
    p.delta = w(w.size() - 1);
    p.beta = beta;
  } else {
    p.alpha = w;
  }
  return p;
}

Eigen::VectorXd ParameterVector::free() const {
  const Eigen::Index k = alpha.size() - 1;
  Eigen::VectorXd f(k + (delta ? 1 : 0) + (beta ? 1 : 0));
  f.head(k) = alpha.tail(k);
  Eigen::Index i = k;
  if (delta) f(i++) = *delta;
  if (beta) f(i++) = *beta;
  return f;
}

void validate_parameters(const ParameterVector& theta, const CovariateSet& set) {
  if (static_cast<std::size_t>(theta.alpha.size()) != set.size())
    throw DimensionError("expected " + std::to_string(set.size()) + " alpha weights, got " +
                         std::to_string(theta.alpha.size()));
  if (set.has_spatial() != theta.delta.has_value())
    throw DimensionError("delta must be present exactly when the model has a spatial effect");
  if (set.depends_on_beta() != theta.beta.has_value())
    throw DimensionError("beta must be present exactly when a component depends on it");
  if (theta.beta && !(*theta.beta > 0.0 && *theta.beta < 1.0))
    throw DomainError("beta must lie strictly inside (0, 1)");
  const Eigen::VectorXd w = theta.weights();
  if ((w.array() < 0.0).any()) throw DomainError("weights must be nonnegative");
  if (std::abs(w.sum() - 1.0) > 1e-10) throw DomainError("weights must sum to one");
}

ModelTerms evaluate_terms(const CovariateSet& set, std::optional<double> beta, int order) {
  ModelTerms t;
  CarEvaluation car;
  if (set.depends_on_beta()) {
    if (!beta) throw DimensionError("beta required for a spatial model");
    car = car_evaluate(set.spectral(), *beta, order);
  }
  t.C.reserve(set.size());
  t.dC.resize(set.size());
  t.d2C.resize(set.size());
  for (std::size_t k = 0; k < set.size(); ++k) {
    const auto& c = set.component(k);
    if (c.spatial_parent) {
      t.C.push_back(c.matrix.cwiseProduct(car.value));
      if (order >= 1) t.dC[k] = c.matrix.cwiseProduct(car.grad);
      if (order >= 2) t.d2C[k] = c.matrix.cwiseProduct(car.hess);
    } else {
      t.C.push_back(c.matrix);
    }
  }
  if (set.has_spatial()) {
    t.G = std::move(car.value);
    t.dG = std::move(car.grad);
    t.d2G = std::move(car.hess);
  }
  return t;
}

Eigen::MatrixXd assemble_correlation(const ParameterVector& theta, const ModelTerms& terms) {
  const Eigen::Index d = terms.C.front().rows();
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t k = 0; k < terms.C.size(); ++k)
    R += theta.alpha(static_cast<Eigen::Index>(k)) * terms.C[k];
  if (theta.delta) R += *theta.delta * terms.G;
  R = 0.5 * (R + R.transpose());
  return R;
}

Eigen::MatrixXd assemble_correlation(const ParameterVector& theta, const CovariateSet& set) {
  validate_parameters(theta, set);
  return assemble_correlation(theta, evaluate_terms(set, theta.beta, 0));
}

Eigen::MatrixXd correlation_dbeta(const ParameterVector& theta, const ModelTerms& terms) {
  const Eigen::Index d = terms.C.front().rows();
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t k = 0; k < terms.C.size(); ++k)
    if (terms.dC[k].size() > 0) D += theta.alpha(static_cast<Eigen::Index>(k)) * terms.dC[k];
  if (theta.delta) D += *theta.delta * terms.dG;
  return D;
}

std::vector<Eigen::MatrixXd> correlation_jacobian(const ParameterVector& theta,
                                                  const ModelTerms& terms) {
  std::vector<Eigen::MatrixXd> J;
  const Eigen::MatrixXd& I = terms.C.front();
  for (std::size_t k = 1; k < terms.C.size(); ++k) J.push_back(terms.C[k] - I);
  if (theta.delta) J.push_back(terms.G - I);
  if (theta.beta) J.push_back(correlation_dbeta(theta, terms));
  return J;
}

}  // namespace structcov
