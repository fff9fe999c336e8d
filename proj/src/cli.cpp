#include "structcov/cli.hpp"

#include "structcov/config.hpp"
#include "structcov/error.hpp"
#include "structcov/identify.hpp"
#include "structcov/init.hpp"
#include "structcov/io.hpp"
#include "structcov/mle.hpp"
#include "structcov/parallel.hpp"
#include "structcov/select.hpp"
#include "structcov/shrink.hpp"
#include "structcov/sim.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace structcov {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json matrix_json(const Eigen::MatrixXd& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) r.push_back(M(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

json theta_json(const ParameterVector& theta, const CovariateSet& set) {
  json t = json::object();
  for (std::size_t k = 0; k < set.size(); ++k) t[set.component(k).name] = theta.alpha(static_cast<Eigen::Index>(k));
  if (theta.delta) t[set.spatial_name()] = *theta.delta;
  if (theta.beta) t["beta"] = *theta.beta;
  return t;
}

void emit(const json& j, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(out);
  if (!f) throw InputError("cannot write '" + out + "'");
  f << j.dump(2) << '\n';
}

struct Common {
  std::uint64_t seed = 1;
  std::optional<std::size_t> threads;
  std::string out;

  void attach(CLI::App* app) {
    app->add_option("--seed", seed, "Random seed");
    app->add_option("--threads", threads, "Worker threads (default: STRUCTCOV_THREADS or 1)");
    app->add_option("--out", out, "Output path");
  }
};

struct DataArgs {
  std::string data, model, mask, mu, sigma, mode;

  void attach(CLI::App* app) {
    app->add_option("--data", data, "T x d data CSV (header optional, NA for missing)")->required();
    app->add_option("--model", model, "Model configuration JSON")->required();
    app->add_option("--mask", mask, "T x d 0/1 CSV of observed entries");
    app->add_option("--mu", mu, "Known means, T x d or 1 x d CSV");
    app->add_option("--sigma", sigma, "Known scales, T x d or 1 x d CSV");
    app->add_option("--mode", mode, "known or unknown (default from the model file)");
  }
};

struct LoadedData {
  ModelConfig model;
  Dataset data;
  StandardizedErrors errors;
  StandardizeMode mode = StandardizeMode::known;
};

Eigen::MatrixXd read_per_time(const std::string& path, Eigen::Index T, Eigen::Index d, const char* what) {
  auto t = read_numeric_csv(path);
  if (!t.present.all()) throw InputError(std::string(what) + " file '" + path + "' has missing entries");
  if (t.values.cols() != d)
    throw InputError(std::string(what) + " file '" + path + "' must have " + std::to_string(d) + " columns");
  if (t.values.rows() == 1) return t.values.replicate(T, 1);
  if (t.values.rows() != T)
    throw InputError(std::string(what) + " file '" + path + "' must have 1 or " + std::to_string(T) + " rows");
  return t.values;
}

LoadedData load_data(const DataArgs& a) {
  LoadedData out;
  auto table = read_numeric_csv(a.data);
  const Eigen::Index T = table.values.rows(), d = table.values.cols();
  std::optional<std::vector<std::string>> ids;
  if (!table.header.empty()) ids = table.header;
  out.model = load_model_config(a.model, ids);
  if (static_cast<Eigen::Index>(out.model.ids.size()) != d)
    throw InputError("model has " + std::to_string(out.model.ids.size()) + " variables but '" + a.data +
                     "' has " + std::to_string(d) + " columns");
  out.mode = a.mode.empty() ? out.model.mode : parse_mode(a.mode);
  out.data.y = table.values;
  out.data.mask = table.present;
  if (!a.mask.empty()) {
    auto m = read_numeric_csv(a.mask);
    if (m.values.rows() != T || m.values.cols() != d)
      throw InputError("mask file '" + a.mask + "' must be " + std::to_string(T) + " x " + std::to_string(d));
    for (Eigen::Index t = 0; t < T; ++t)
      for (Eigen::Index i = 0; i < d; ++i) {
        const double v = m.values(t, i);
        if (!m.present(t, i) || (v != 0.0 && v != 1.0))
          throw InputError("mask file '" + a.mask + "' must contain only 0 and 1");
        out.data.mask(t, i) = out.data.mask(t, i) && v == 1.0;
      }
  }
  if (out.mode == StandardizeMode::known) {
    if (a.mu.empty()) throw InputError("known mode needs a mu file (--mu)");
    if (a.sigma.empty()) throw InputError("known mode needs a sigma file (--sigma)");
    if (!fs::exists(a.mu)) throw InputError("mu file '" + a.mu + "' does not exist");
    if (!fs::exists(a.sigma)) throw InputError("sigma file '" + a.sigma + "' does not exist");
    out.data.mu = read_per_time(a.mu, T, d, "mu");
    out.data.sigma = read_per_time(a.sigma, T, d, "sigma");
  }
  validate_dataset(out.data, out.mode);
  out.errors = standardize(out.data, out.mode);
  return out;
}

std::vector<double> grid_of(const ModelConfig& m) {
  return m.beta_grid.empty() ? default_beta_grid() : m.beta_grid;
}

int cmd_fit(const DataArgs& a, const Common& c, bool no_wsce, std::optional<int> boot_B,
            const std::string& shrink, double level, const std::string& sce_csv, const std::string& wsce_csv) {
  const std::size_t threads = resolve_threads(c.threads);
  auto in = load_data(a);
  const CovariateSet& set = in.model.set;
  const Eigen::MatrixXd P = pearson_type(in.errors);
  const auto init = qp_init(P, set, grid_of(in.model));
  const FitResult fit = fit_sce(in.errors, set, init.theta0, in.model.fit);

  json j;
  j["command"] = "fit";
  j["mode"] = in.mode == StandardizeMode::known ? "known" : "unknown";
  j["T"] = in.errors.T();
  j["d"] = in.errors.d();
  j["observed"] = fit.observed;
  j["variables"] = in.model.ids;
  j["converged"] = fit.converged;
  j["iterations"] = fit.iterations;
  j["grad_norm"] = fit.grad_norm;
  j["loglik"] = total_loglik(fit);
  j["loglik_per_time"] = fit.loglik_transformed;
  j["loglik_initial_per_time"] = fit.loglik_initial;
  j["bic"] = bic(fit, set);
  j["theta"] = theta_json(fit.theta, set);
  j["free_names"] = fit.names;
  j["fisher"] = matrix_json(fit.fisher);
  json init_j;
  init_j["theta"] = theta_json(init.theta0, set);
  init_j["objective"] = init.objective;
  json lbs = json::array();
  for (const auto& lb : init.constraints_added) lbs.push_back({{"component", lb.component}, {"bound", lb.bound}});
  init_j["constraints_added"] = lbs;
  j["init"] = init_j;
  try {
    json cis = json::array();
    for (const auto& ci : confidence_intervals(fit, level))
      cis.push_back({{"name", ci.name}, {"estimate", ci.estimate}, {"std_error", ci.std_error},
                     {"lower", ci.lower}, {"upper", ci.upper}});
    j["confidence_intervals"] = cis;
    j["confidence_level"] = level;
  } catch (const EstimationError& e) {
    j["confidence_intervals_error"] = e.what();
  }
  j["R_sce"] = matrix_json(fit.R);
  if (!sce_csv.empty()) write_matrix_csv(sce_csv, fit.R, in.model.ids);

  if (!no_wsce) {
    WsceMethod method = shrink.empty() ? in.model.shrinkage : parse_wsce_method(shrink);
    if (method == WsceMethod::automatic)
      method = in.mode == StandardizeMode::known && in.errors.complete() ? WsceMethod::closed_form
                                                                         : WsceMethod::bootstrap;
    ShrinkageEstimate s;
    if (method == WsceMethod::closed_form) {
      s = shrink_closed_form(fit, set, in.errors);
    } else {
      BootstrapOptions bo;
      bo.B = boot_B.value_or(in.model.bootstrap_B);
      bo.seed = c.seed != 1 ? c.seed : in.model.bootstrap_seed;
      bo.max_iterations = in.model.bootstrap_max_iterations;
      bo.threads = threads;
      bo.mode = in.mode;
      s = lambda_bootstrap(fit, init.theta0, set, in.errors, bo);
    }
    const Eigen::MatrixXd W = wsce(fit.R, nearest_pd_correlation(P), s.lambda);
    j["shrinkage"] = {{"lambda", s.lambda},       {"raw_lambda", s.raw_lambda}, {"pi_hat", s.pi_hat},
                      {"rho_hat", s.rho_hat},     {"gamma_hat", s.gamma_hat},   {"method", to_string(s.method)},
                      {"clamped", s.clamped},     {"pairwise_kernel", s.pairwise_kernel},
                      {"replicates", s.replicates}};
    j["R_wsce"] = matrix_json(W);
    if (!wsce_csv.empty()) write_matrix_csv(wsce_csv, W, in.model.ids);
  }

  json eff = json::array();
  for (const auto& e : average_effects(fit.theta, set))
    eff.push_back({{"name", e.name}, {"kind", to_string(e.kind)}, {"value", e.value}, {"pairs", e.pairs}});
  j["average_effects"] = eff;
  emit(j, c.out);
  if (!fit.converged) {
    std::cerr << "warning: optimizer stopped before convergence (gradient norm " << fit.grad_norm << ")\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_select(const DataArgs& a, const Common& c, const std::string& csv) {
  auto in = load_data(a);
  SelectOptions opt;
  opt.beta_grid = grid_of(in.model);
  opt.fit = in.model.fit;
  opt.threads = resolve_threads(c.threads);
  const auto rep = select_best(in.errors, in.model.set, opt);
  json j;
  j["command"] = "select";
  j["reference"] = rep.reference;
  j["candidates"] = rep.ranking.size();
  json rows = json::array();
  for (const auto& m : rep.ranking) {
    json r{{"terms", m.terms}, {"converged", m.converged}};
    if (m.error.empty()) {
      r["bic"] = m.bic;
      r["centered_bic"] = m.centered_bic;
      r["loglik"] = total_loglik(*m.fit);
      r["theta"] = theta_json(m.fit->theta, in.model.set.restrict(m.terms));
    } else {
      r["error"] = m.error;
    }
    rows.push_back(std::move(r));
  }
  j["ranking"] = rows;
  emit(j, c.out);
  if (!csv.empty()) {
    std::ofstream f(csv);
    if (!f) throw InputError("cannot write '" + csv + "'");
    f << "rank,model,bic,centered_bic,converged\n";
    for (std::size_t i = 0; i < rep.ranking.size(); ++i) {
      const auto& m = rep.ranking[i];
      std::string name;
      for (const auto& t : m.terms) name += (name.empty() ? "" : "+") + t;
      f << i + 1 << ',' << name << ',' << (m.error.empty() ? format_double(m.bic) : "NA") << ','
        << (m.error.empty() ? format_double(m.centered_bic) : "NA") << ',' << (m.converged ? 1 : 0) << '\n';
    }
  }
  return kExitOk;
}

int cmd_check_id(const std::string& model, const std::string& grid, double tol, const Common& c) {
  auto cfg = load_model_config(model);
  const auto g = grid.empty() ? grid_of(cfg) : parse_grid(grid);
  const double t = tol > 0 ? tol : cfg.id_tol;
  const auto rep = check_identifiability(cfg.set, g, t, resolve_threads(c.threads));
  json j;
  j["command"] = "check-id";
  j["identifiable"] = rep.identifiable;
  j["independence_ok"] = rep.independence_ok;
  j["grid"] = rep.grid;
  j["tol"] = rep.tol;
  j["max_lp_value"] = rep.max_lp_value;
  j["pairs_checked"] = rep.pairs.size();
  j["dependent_betas"] = rep.dependent_betas;
  json w = json::array();
  for (const auto& x : rep.witnesses)
    w.push_back({{"beta", x.beta}, {"beta_prime", x.beta_prime}, {"lp_value", x.lp_value}, {"residual", x.residual},
                 {"theta", theta_json(x.theta, cfg.set)}, {"theta_prime", theta_json(x.theta_prime, cfg.set)}});
  j["witnesses"] = w;
  emit(j, c.out);
  return rep.identifiable ? kExitOk : kExitNotIdentifiable;
}

struct ScenarioArgs {
  std::string config, setting = "fss", missing, mode, wsce_method;
  std::optional<Eigen::Index> d, T;
  std::optional<double> xi;
  std::optional<int> reps, bootstrap_B;
  std::vector<std::string> estimators;

  void attach(CLI::App* app, bool bench) {
    app->add_option("--config", config, "Scenario JSON; flags override its values");
    app->add_option("--setting", setting, "fss or structured");
    app->add_option("--d", d, "Number of variables");
    app->add_option("--t", T, "Number of time points");
    app->add_option("--xi", xi, "Misspecification: 0 follows the model, 1 ignores the covariates");
    app->add_option("--missing", missing, "none or monotone");
    app->add_option("--mode", mode, "known or unknown mean and scale");
    if (bench) {
      app->add_option("--reps", reps, "Replicates");
      app->add_option("--estimators", estimators, "Subset of pearson, ledoit_wolf, ive, sce, wsce")->delimiter(',');
      app->add_option("--wsce", wsce_method, "auto, closed_form or bootstrap");
      app->add_option("--bootstrap-b", bootstrap_B, "Bootstrap replicates for the WSCE weight");
    }
  }

  ScenarioConfig build(const Common& c, CLI::App* app) const {
    ScenarioConfig s = config.empty() ? ScenarioConfig{} : load_scenario_config(config);
    if (config.empty() || app->count("--setting")) s.kind = parse_scenario_kind(setting);
    if (d) s.d = *d;
    if (T) s.T = *T;
    if (xi) s.xi = *xi;
    if (!missing.empty()) s.missing = parse_missing(missing);
    if (!mode.empty()) s.known_musigma = parse_mode(mode) == StandardizeMode::known;
    if (reps) s.reps = *reps;
    if (!estimators.empty()) {
      s.estimators.clear();
      for (const auto& e : estimators) s.estimators.push_back(parse_estimator(e));
    }
    if (!wsce_method.empty()) s.wsce_method = parse_wsce_method(wsce_method);
    if (bootstrap_B) s.bootstrap_B = *bootstrap_B;
    if (config.empty() || app->count("--seed")) s.seed = c.seed;
    if (c.threads || config.empty()) s.threads = resolve_threads(c.threads);
    validate_config(s);
    return s;
  }
};

json scenario_json(const ScenarioConfig& s) {
  const ParameterVector th = s.theta_star ? *s.theta_star : default_theta(s.kind);
  json est = json::array();
  for (auto e : s.estimators) est.push_back(to_string(e));
  return {{"kind", to_string(s.kind)},
          {"d", s.d},
          {"T", s.T},
          {"xi", s.xi},
          {"missing", to_string(s.missing)},
          {"known_musigma", s.known_musigma},
          {"seed", s.seed},
          {"reps", s.reps},
          {"estimators", est},
          {"wsce_method", to_string(s.wsce_method)},
          {"bootstrap_B", s.bootstrap_B},
          {"theta_star", {{"alpha", std::vector<double>(th.alpha.data(), th.alpha.data() + th.alpha.size())},
                          {"delta", *th.delta},
                          {"beta", *th.beta}}}};
}

void write_labels(const fs::path& p, const std::vector<std::string>& ids, const Eigen::MatrixXd& F) {
  // Recover cluster labels from a 0/1 co-membership matrix.
  std::ofstream f(p);
  f << "id,label\n";
  std::vector<int> label(ids.size(), -1);
  int next = 0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (label[i] < 0) {
      label[i] = next++;
      for (std::size_t j = i + 1; j < ids.size(); ++j)
        if (F(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) == 1.0) label[j] = label[i];
    }
    f << ids[i] << ',' << label[i] << '\n';
  }
}

int cmd_simulate(const ScenarioArgs& sa, const Common& c, CLI::App* app, int replicate) {
  const ScenarioConfig s = sa.build(c, app);
  if (c.out.empty()) throw InputError("simulate needs --out DIR");
  const fs::path dir(c.out);
  fs::create_directories(dir);
  auto sim = simulate_replicate(s, replicate);
  const Eigen::Index d = s.d, T = s.T;
  std::vector<std::string> ids;
  for (Eigen::Index i = 0; i < d; ++i) ids.push_back("v" + std::to_string(i));

  {
    std::ofstream f(dir / "data.csv");
    for (Eigen::Index i = 0; i < d; ++i) f << (i ? "," : "") << ids[static_cast<std::size_t>(i)];
    f << '\n';
    for (Eigen::Index t = 0; t < T; ++t) {
      for (Eigen::Index i = 0; i < d; ++i)
        f << (i ? "," : "") << (sim.data.mask(t, i) ? format_double(sim.data.y(t, i)) : "NA");
      f << '\n';
    }
  }
  write_matrix_csv((dir / "mu.csv").string(), Eigen::MatrixXd::Zero(1, d), ids);
  write_matrix_csv((dir / "sigma.csv").string(), Eigen::MatrixXd::Ones(1, d), ids);
  write_matrix_csv((dir / "truth.csv").string(), sim.R_true, ids);
  write_labels(dir / "comcol.csv", ids, sim.set.component(1).matrix);
  write_labels(dir / "region.csv", ids, sim.set.component(2).matrix);
  {
    std::ofstream f(dir / "adjacency.csv");
    f << "from,to\n";
    const auto& M = sim.set.graph()->adjacency();
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = i + 1; j < d; ++j)
        if (M(i, j) == 1.0) f << ids[static_cast<std::size_t>(i)] << ',' << ids[static_cast<std::size_t>(j)] << '\n';
  }
  json model{{"components", json::array({{{"name", "comcol"}, {"kind", "cluster"}, {"labels", "comcol.csv"}},
                                         {{"name", "region"}, {"kind", "cluster"}, {"labels", "region.csv"}},
                                         {{"name", "global"}, {"kind", "global"}}})},
             {"spatial", {{"name", "spatial"}, {"adjacency", "adjacency.csv"}}},
             {"mode", s.known_musigma ? "known" : "unknown"}};
  std::ofstream(dir / "model.json") << model.dump(2) << '\n';
  json meta = scenario_json(s);
  meta["replicate"] = replicate;
  meta["theta_true"] = theta_json(sim.theta_star, sim.set);
  meta["files"] = {"data.csv", "mu.csv", "sigma.csv", "truth.csv", "comcol.csv", "region.csv", "adjacency.csv", "model.json"};
  std::ofstream(dir / "scenario.json") << meta.dump(2) << '\n';
  return kExitOk;
}

int cmd_benchmark(const ScenarioArgs& sa, const Common& c, CLI::App* app, const std::string& csv) {
  const ScenarioConfig s = sa.build(c, app);
  const auto rep = run_benchmark(s);
  json j;
  j["command"] = "benchmark";
  j["scenario"] = scenario_json(s);
  json est = json::array();
  for (auto e : rep.estimators) est.push_back(to_string(e));
  j["estimators"] = est;
  j["notes"] = rep.notes;
  json reps = json::array();
  bool all_converged = true;
  for (const auto& r : rep.replicates) {
    json m = json::object();
    for (std::size_t k = 0; k < rep.estimators.size(); ++k) m[to_string(rep.estimators[k])] = r.mae[k];
    json row{{"replicate", r.replicate}, {"mae", m}, {"sce_converged", r.sce_converged}};
    if (r.lambda >= 0) row["lambda"] = r.lambda;
    reps.push_back(std::move(row));
    all_converged = all_converged && r.sce_converged;
  }
  j["replicates"] = reps;
  json summary = json::object();
  for (auto e : rep.estimators) {
    auto v = rep.mae_of(e);
    if (v.empty()) continue;
    double m = 0;
    for (double x : v) m += x;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    const double med = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    summary[to_string(e)] = {{"mean", m / static_cast<double>(n)}, {"median", med}};
  }
  j["summary"] = summary;
  emit(j, c.out);
  if (!csv.empty()) {
    std::ofstream f(csv);
    if (!f) throw InputError("cannot write '" + csv + "'");
    f << "replicate,estimator,mae,seconds\n";
    for (const auto& r : rep.replicates)
      for (std::size_t k = 0; k < rep.estimators.size(); ++k)
        f << r.replicate << ',' << to_string(rep.estimators[k]) << ',' << format_double(r.mae[k]) << ','
          << format_double(r.seconds[k]) << '\n';
  }
  return all_converged ? kExitOk : kExitNotConverged;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Structured correlation estimation from pairwise covariates and spatial structure"};
  app.require_subcommand(1);

  Common fit_c, sel_c, id_c, sim_c, bench_c;
  DataArgs fit_a, sel_a;

  auto* fit = app.add_subcommand("fit", "Fit the structured estimator and its shrinkage combination");
  fit_a.attach(fit);
  fit_c.attach(fit);
  bool no_wsce = false;
  std::optional<int> boot_B;
  std::string shrink, sce_csv, wsce_csv;
  double level = 0.95;
  fit->add_flag("--no-wsce", no_wsce, "Skip the shrinkage step");
  fit->add_option("--bootstrap-b", boot_B, "Bootstrap replicates for the shrinkage weight");
  fit->add_option("--shrinkage", shrink, "auto, closed_form or bootstrap");
  fit->add_option("--level", level, "Confidence level for intervals")->check(CLI::Range(0.5, 0.9999));
  fit->add_option("--sce-csv", sce_csv, "Also write the fitted correlation matrix as CSV");
  fit->add_option("--wsce-csv", wsce_csv, "Also write the shrunk correlation matrix as CSV");

  auto* sel = app.add_subcommand("select", "Rank all admissible sub-models by BIC");
  sel_a.attach(sel);
  sel_c.attach(sel);
  std::string sel_csv;
  sel->add_option("--csv", sel_csv, "CSV of centered BICs");

  auto* cid = app.add_subcommand("check-id", "Check identifiability of a model over a beta grid");
  id_c.attach(cid);
  std::string id_model, id_grid;
  double id_tol = 0;
  cid->add_option("--model", id_model, "Model configuration JSON")->required();
  cid->add_option("--grid", id_grid, "start:stop:count");
  cid->add_option("--tol", id_tol, "LP tolerance (default from the model file)");

  ScenarioArgs sim_a, bench_a;
  auto* sim = app.add_subcommand("simulate", "Write one simulated dataset with its structures");
  sim_a.attach(sim, false);
  sim_c.attach(sim);
  int replicate = 0;
  sim->add_option("--replicate", replicate, "Replicate index within the seed");

  auto* bench = app.add_subcommand("benchmark", "Score estimators over simulated replicates");
  bench_a.attach(bench, true);
  bench_c.attach(bench);
  std::string bench_csv;
  bench->add_option("--csv", bench_csv, "Per-replicate CSV (replicate, estimator, mae, seconds)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*fit) return cmd_fit(fit_a, fit_c, no_wsce, boot_B, shrink, level, sce_csv, wsce_csv);
    if (*sel) return cmd_select(sel_a, sel_c, sel_csv);
    if (*cid) return cmd_check_id(id_model, id_grid, id_tol, id_c);
    if (*sim) return cmd_simulate(sim_a, sim_c, sim, replicate);
    if (*bench) return cmd_benchmark(bench_a, bench_c, bench, bench_csv);
  } catch (const IdentifiabilityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNotIdentifiable;
  } catch (const EstimationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNotConverged;
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNotConverged;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace structcov
