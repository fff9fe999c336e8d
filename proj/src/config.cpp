#include "structcov/config.hpp"

#include "structcov/error.hpp"
#include "structcov/identify.hpp"
#include "structcov/io.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>

namespace structcov {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("'" + path + "' is not valid JSON: " + e.what());
  }
}

std::string resolve(const fs::path& base, const std::string& p) {
  fs::path q(p);
  return (q.is_absolute() ? q : base / q).string();
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InputError(std::string("config key '") + key + "' has the wrong type");
  }
}

std::vector<std::string> ids_from_labels(const std::string& path) {
  auto rows = read_csv_cells(path);
  std::vector<std::string> ids;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != 2) throw InputError("'" + path + "' must have rows id,label");
    if (r == 0 && (rows[r][0] == "id" || rows[r][0] == "ID")) continue;
    ids.push_back(rows[r][0]);
  }
  return ids;
}

}  // namespace

std::vector<double> parse_grid(const std::string& spec) {
  const auto a = spec.find(':');
  const auto b = spec.find(':', a == std::string::npos ? a : a + 1);
  if (a == std::string::npos || b == std::string::npos)
    throw InputError("grid must look like start:stop:count, got '" + spec + "'");
  try {
    std::size_t used = 0;
    const double start = std::stod(spec.substr(0, a));
    const double stop = std::stod(spec.substr(a + 1, b - a - 1));
    const int count = std::stoi(spec.substr(b + 1), &used);
    if (used != spec.size() - b - 1) throw std::invalid_argument("count");
    return linspace_grid(start, stop, count);
  } catch (const std::logic_error&) {
    throw InputError("grid must look like start:stop:count, got '" + spec + "'");
  }
}

StandardizeMode parse_mode(const std::string& s) {
  if (s == "known") return StandardizeMode::known;
  if (s == "unknown") return StandardizeMode::unknown;
  throw InputError("mode must be known or unknown, got '" + s + "'");
}

WsceMethod parse_wsce_method(const std::string& s) {
  if (s == "auto") return WsceMethod::automatic;
  if (s == "closed_form") return WsceMethod::closed_form;
  if (s == "bootstrap") return WsceMethod::bootstrap;
  throw InputError("shrinkage must be auto, closed_form or bootstrap, got '" + s + "'");
}

ScenarioKind parse_scenario_kind(const std::string& s) {
  if (s == "fss") return ScenarioKind::fss;
  if (s == "structured") return ScenarioKind::structured;
  throw InputError("setting must be fss or structured, got '" + s + "'");
}

Estimator parse_estimator(const std::string& s) {
  for (auto e : all_estimators())
    if (s == to_string(e)) return e;
  throw InputError("unknown estimator '" + s + "'");
}

MissingPattern parse_missing(const std::string& s) {
  if (s == "none") return MissingPattern::none;
  if (s == "monotone") return MissingPattern::monotone;
  if (s == "custom") return MissingPattern::custom;
  throw InputError("missing pattern must be none, monotone or custom, got '" + s + "'");
}

ModelConfig load_model_config(const std::string& path, const std::optional<std::vector<std::string>>& ids_hint) {
  const json j = read_json(path);
  const fs::path base = fs::path(path).parent_path();
  if (!j.is_object() || !j.contains("components") || !j["components"].is_array())
    throw InputError("'" + path + "' needs a \"components\" array");

  ModelConfig cfg;
  if (ids_hint) {
    cfg.ids = *ids_hint;
  } else if (j.contains("variables")) {
    cfg.ids = get_or<std::vector<std::string>>(j, "variables", {});
  } else if (j.contains("d")) {
    const int d = get_or<int>(j, "d", 0);
    for (int i = 0; i < d; ++i) cfg.ids.push_back(std::to_string(i));
  } else {
    for (const auto& c : j["components"])
      if (c.value("kind", "") == "cluster" && c.contains("labels")) {
        cfg.ids = ids_from_labels(resolve(base, c["labels"].get<std::string>()));
        break;
      }
  }
  if (cfg.ids.size() < 2) throw InputError("'" + path + "': cannot determine at least two variables");
  if (std::set<std::string>(cfg.ids.begin(), cfg.ids.end()).size() != cfg.ids.size())
    throw InputError("variable ids must be unique");
  const auto d = static_cast<Eigen::Index>(cfg.ids.size());

  std::string spatial_name = "spatial";
  std::optional<SpatialGraph> graph;
  if (j.contains("spatial")) {
    const json& s = j["spatial"];
    spatial_name = get_or<std::string>(s, "name", "spatial");
    if (!s.contains("adjacency")) throw InputError("spatial entry needs an \"adjacency\" file");
    graph = SpatialGraph(read_adjacency_csv(resolve(base, s["adjacency"].get<std::string>()), cfg.ids));
  }

  std::vector<ComponentMatrix> comps;
  std::map<std::string, std::size_t> by_name;
  for (const auto& c : j["components"]) {
    const std::string name = get_or<std::string>(c, "name", "");
    const std::string kind = get_or<std::string>(c, "kind", "");
    if (name.empty()) throw InputError("every component needs a name");
    ComponentMatrix m;
    if (kind == "cluster") {
      if (!c.contains("labels")) throw InputError("cluster '" + name + "' needs a \"labels\" file");
      m = build_cluster_matrix(read_labels_csv(resolve(base, c["labels"].get<std::string>()), cfg.ids), name);
    } else if (kind == "global") {
      m = build_global_matrix(d, name);
    } else if (kind == "matrix") {
      if (!c.contains("file")) throw InputError("matrix '" + name + "' needs a \"file\"");
      const std::string f = resolve(base, c["file"].get<std::string>());
      auto t = read_numeric_csv(f);
      if (!t.present.all()) throw InputError("'" + f + "' has missing entries");
      if (t.values.rows() != d || t.values.cols() != d)
        throw InputError("'" + f + "' must be " + std::to_string(d) + " x " + std::to_string(d));
      m = matrix_component(t.values, name);
    } else if (kind == "interaction") {
      const auto parents = get_or<std::vector<std::string>>(c, "parents", {});
      if (parents.size() != 2) throw InputError("interaction '" + name + "' needs two parents");
      auto parent = [&](const std::string& p) {
        if (graph && p == spatial_name) return spatial_component(spatial_name);
        auto it = by_name.find(p);
        if (it == by_name.end())
          throw InputError("interaction '" + name + "' references '" + p + "', which is not declared before it");
        return comps[it->second];
      };
      m = hadamard_interaction(parent(parents[0]), parent(parents[1]), name);
    } else {
      throw InputError("component '" + name + "' has unknown kind '" + kind + "'");
    }
    by_name[name] = comps.size();
    comps.push_back(std::move(m));
  }
  cfg.set = CovariateSet(d, std::move(comps), std::move(graph), spatial_name);
  if (j.contains("roster")) cfg.set.set_roster(get_or<std::vector<std::string>>(j, "roster", {}));

  if (j.contains("beta_grid")) {
    const json& g = j["beta_grid"];
    if (g.is_string()) {
      cfg.beta_grid = parse_grid(g.get<std::string>());
    } else {
      cfg.beta_grid = get_or<std::vector<double>>(j, "beta_grid", {});
      for (double b : cfg.beta_grid)
        if (!(b > 0.0 && b < 1.0)) throw InputError("beta grid points must lie in (0, 1)");
    }
  }
  cfg.mode = parse_mode(get_or<std::string>(j, "mode", "known"));
  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    cfg.fit.grad_tol = get_or<double>(t, "grad_tol", cfg.fit.grad_tol);
    cfg.fit.max_iterations = get_or<int>(t, "max_iterations", cfg.fit.max_iterations);
    cfg.id_tol = get_or<double>(t, "identifiability", cfg.id_tol);
  }
  if (j.contains("bootstrap")) {
    const json& b = j["bootstrap"];
    cfg.bootstrap_B = get_or<int>(b, "B", cfg.bootstrap_B);
    cfg.bootstrap_seed = get_or<std::uint64_t>(b, "seed", cfg.bootstrap_seed);
    cfg.bootstrap_max_iterations = get_or<int>(b, "max_iterations", cfg.bootstrap_max_iterations);
  }
  cfg.shrinkage = parse_wsce_method(get_or<std::string>(j, "shrinkage", "auto"));
  return cfg;
}

ScenarioConfig load_scenario_config(const std::string& path) {
  const json j = read_json(path);
  if (!j.is_object()) throw InputError("'" + path + "' must hold a JSON object");
  static const std::set<std::string> known{
      "kind", "d", "T", "theta_star", "xi", "missing", "missing_fraction", "missing_max_delay",
      "known_musigma", "seed", "reps", "threads", "estimators", "wsce_method", "bootstrap_B",
      "bootstrap_max_iterations", "beta_grid"};
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw InputError("'" + path + "': unknown key '" + k + "'");
  ScenarioConfig c;
  c.kind = parse_scenario_kind(get_or<std::string>(j, "kind", "fss"));
  c.d = get_or<Eigen::Index>(j, "d", c.d);
  c.T = get_or<Eigen::Index>(j, "T", c.T);
  if (j.contains("theta_star")) {
    const json& t = j["theta_star"];
    Eigen::VectorXd w(5);
    const auto alpha = get_or<std::vector<double>>(t, "alpha", {});
    if (alpha.size() != 4) throw InputError("theta_star.alpha needs 4 weights (identity first)");
    for (int i = 0; i < 4; ++i) w(i) = alpha[static_cast<std::size_t>(i)];
    w(4) = get_or<double>(t, "delta", 0.0);
    c.theta_star = ParameterVector::from_weights(w, get_or<double>(t, "beta", 0.5));
  }
  c.xi = get_or<double>(j, "xi", c.xi);
  c.missing = parse_missing(get_or<std::string>(j, "missing", "none"));
  c.missing_fraction = get_or<double>(j, "missing_fraction", c.missing_fraction);
  c.missing_max_delay = get_or<int>(j, "missing_max_delay", c.missing_max_delay);
  c.known_musigma = get_or<bool>(j, "known_musigma", c.known_musigma);
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
  c.reps = get_or<int>(j, "reps", c.reps);
  c.threads = get_or<std::size_t>(j, "threads", c.threads);
  if (j.contains("estimators")) {
    c.estimators.clear();
    for (const auto& e : get_or<std::vector<std::string>>(j, "estimators", {})) c.estimators.push_back(parse_estimator(e));
  }
  c.wsce_method = parse_wsce_method(get_or<std::string>(j, "wsce_method", "auto"));
  c.bootstrap_B = get_or<int>(j, "bootstrap_B", c.bootstrap_B);
  c.bootstrap_max_iterations = get_or<int>(j, "bootstrap_max_iterations", c.bootstrap_max_iterations);
  c.beta_grid = get_or<std::vector<double>>(j, "beta_grid", {});
  return c;
}

}  // namespace structcov
