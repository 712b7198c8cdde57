// Batch command line for hazard smooth backfitting: data simulation, single
// fits, Monte Carlo studies and bandwidth search.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <string>

#include "hazsbf/classical_backfit.hpp"
#include "hazsbf/evaluation.hpp"
#include "hazsbf/io.hpp"
#include "hazsbf/sbf_local_constant.hpp"
#include "hazsbf/sbf_local_linear.hpp"

namespace {

using namespace hazsbf;

SimConfig sim_config_from(Config& cfg) {
  SimConfig s;
  s.n = static_cast<int>(cfg.get_int("n", s.n));
  s.d = static_cast<int>(cfg.get_int("d", s.d));
  s.rho = cfg.get_real("rho", s.rho);
  s.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 1));
  s.gompertz_rate = cfg.get_real("gompertz_rate", s.gompertz_rate);
  s.amplitude = cfg.get_real("amplitude", s.amplitude);
  s.censor_scale_divisor = cfg.get_real("censor_scale_divisor", s.censor_scale_divisor);
  s.horizon = cfg.get_real("horizon", 0.0);
  s.threads = static_cast<int>(cfg.get_int("threads", 0));
  try {
    check_sim_config(s);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return s;
}

FitConfig fit_config_from(Config& cfg) {
  FitConfig f;
  std::string kernel = cfg.get_string("kernel", "epanechnikov");
  if (kernel != "epanechnikov")
    throw ConfigError("config: unsupported kernel '" + kernel + "'");
  f.bandwidth = cfg.get_real_list("bandwidth", {});
  f.tolerance = cfg.get_real("tolerance", f.tolerance);
  f.tol_offset = cfg.get_real("tol_offset", f.tol_offset);
  f.max_iterations = static_cast<int>(cfg.get_int("max_iterations", f.max_iterations));
  f.norming = parse_norming(cfg.get_string("norming", "exposure"));
  f.quadrature_order = static_cast<int>(cfg.get_int("quadrature_order", f.quadrature_order));
  f.threads = static_cast<int>(cfg.get_int("threads", 0));
  return f;
}

int run_simulate(const std::string& config_path, const std::string& out_path) {
  Config cfg = Config::from_file(config_path);
  SimConfig scen = sim_config_from(cfg);
  cfg.finish();
  SimulatedData sim = simulate_dataset(scen);
  write_dataset_csv(sim.data, out_path);
  write_sim_digest(scen, sim, out_path + ".digest");
  std::printf("wrote %d records to %s (horizon %s, censored %.1f%%)\n", sim.data.n(),
              out_path.c_str(), format_real(sim.horizon).c_str(),
              100.0 * sim.censored_fraction);
  return 0;
}

EvaluationGrid grid_for_dataset(const Dataset& data, Config& cfg) {
  double max_exit = 0.0;
  for (const auto& r : data.records) max_exit = std::max(max_exit, r.exit_time);
  double t_max = cfg.get_real("t_max", 0.0);
  if (t_max <= 0.0) t_max = max_exit;

  auto points = cfg.get_real_list("grid_points", {101});
  if (points.size() != 1 && static_cast<int>(points.size()) != data.dim + 1)
    throw ConfigError("config: grid_points must be one value or d+1 values");

  std::vector<double> lo_default(data.dim), hi_default(data.dim);
  for (int j = 0; j < data.dim; ++j) {
    double lo = 1e300, hi = -1e300;
    for (const auto& r : data.records) {
      const auto& c = r.covariates[j];
      if (c.moves()) {
        lo = std::min(lo, c.param + r.entry_time);
        hi = std::max(hi, c.param + r.exit_time);
      } else {
        lo = std::min(lo, c.param);
        hi = std::max(hi, c.param);
      }
    }
    lo_default[j] = lo;
    hi_default[j] = hi;
  }
  auto z_lo = cfg.get_real_list("z_lo", lo_default);
  auto z_hi = cfg.get_real_list("z_hi", hi_default);
  if (z_lo.size() == 1) z_lo.assign(data.dim, z_lo[0]);
  if (z_hi.size() == 1) z_hi.assign(data.dim, z_hi[0]);
  if (static_cast<int>(z_lo.size()) != data.dim || static_cast<int>(z_hi.size()) != data.dim)
    throw ConfigError("config: z_lo/z_hi must be one value or d values");

  EvaluationGrid grid;
  auto pts = [&](int k) {
    return static_cast<int>(points.size() == 1 ? points[0] : points[k]);
  };
  grid.dims.push_back({0.0, t_max, pts(0)});
  for (int j = 0; j < data.dim; ++j) grid.dims.push_back({z_lo[j], z_hi[j], pts(j + 1)});
  return grid;
}

int run_fit(const std::string& data_path, const std::string& config_path,
            const std::string& out_path) {
  Config cfg = Config::from_file(config_path);
  Estimator which = parse_estimator(cfg.get_string("estimator", "lc-sbf"));
  FitConfig fit_cfg = fit_config_from(cfg);
  if (fit_cfg.bandwidth.empty()) throw ConfigError("config: bandwidth is required");

  Dataset raw = read_dataset_csv(data_path);
  EvaluationGrid grid = grid_for_dataset(raw, cfg);
  cfg.finish();
  try {
    check_fit_config(fit_cfg, grid);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  ValidatedDataset validated = validate_dataset(raw, grid);
  if (validated.summary.n_clipped || validated.summary.n_dropped)
    std::printf("validation: clipped %d, dropped %d records\n", validated.summary.n_clipped,
                validated.summary.n_dropped);

  AdditiveFit fit;
  switch (which) {
    case Estimator::LocalConstantSbf: fit = lc_fit(validated.data, grid, fit_cfg); break;
    case Estimator::LocalLinearSbf: fit = ll_fit(validated.data, grid, fit_cfg); break;
    case Estimator::LocalConstantClassic:
      fit = classic_lc_fit(validated.data, grid, fit_cfg);
      break;
    case Estimator::LocalLinearClassic:
      fit = classic_ll_fit(validated.data, grid, fit_cfg);
      break;
  }
  fit.estimator = which;
  write_fit_file(fit, out_path);
  std::printf("%s: %s after %d sweeps (criterion %s), intercept %s\n",
              estimator_name(which).c_str(),
              fit.converged ? "converged" : (fit.diverged ? "diverged" : "not converged"),
              fit.iterations_used, format_real(fit.final_criterion).c_str(),
              format_real(fit.intercept).c_str());
  return fit.converged ? 0 : 3;
}

int run_mc_study(const std::string& config_path, const std::string& out_path) {
  Config cfg = Config::from_file(config_path);
  SimConfig scen = sim_config_from(cfg);
  FitConfig fit_cfg = fit_config_from(cfg);
  auto names = cfg.get_string_list("estimators", {"ll-sbf", "lc-sbf"});
  double bandwidth = cfg.get_real("bandwidth", 0.0);
  int n_reps = static_cast<int>(cfg.get_int("n_reps", 100));
  int grid_points = static_cast<int>(cfg.get_int("grid_points", 101));
  cfg.finish();
  if (bandwidth <= 0.0) throw ConfigError("config: bandwidth must be positive");

  std::vector<Estimator> estimators;
  for (const auto& name : names) estimators.push_back(parse_estimator(name));

  StudyScenario scenario{scen, scen.horizon > 0.0 ? scen.horizon : calibrate_horizon(scen)};
  scenario.sim.horizon = scenario.horizon;
  auto grid = simulation_grid(scen.d, scenario.horizon, grid_points);
  try {
    auto reports = mc_study(scenario.sim, estimators, bandwidth, n_reps, grid, fit_cfg);
    write_mc_report(reports, scenario, out_path);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  std::printf("wrote study report to %s\n", out_path.c_str());
  return 0;
}

int run_bandwidth_search(const std::string& config_path, const std::string& out_path) {
  Config cfg = Config::from_file(config_path);
  SimConfig scen = sim_config_from(cfg);
  FitConfig fit_cfg = fit_config_from(cfg);
  Estimator which = parse_estimator(cfg.get_string("estimator", "ll-sbf"));
  auto candidates = cfg.get_real_list("bandwidths", {});
  int n_reps = static_cast<int>(cfg.get_int("n_reps", 20));
  int grid_points = static_cast<int>(cfg.get_int("grid_points", 101));
  cfg.finish();
  if (candidates.size() < 2)
    throw ConfigError("config: bandwidths needs at least two candidates");

  StudyScenario scenario{scen, scen.horizon > 0.0 ? scen.horizon : calibrate_horizon(scen)};
  scenario.sim.horizon = scenario.horizon;
  auto grid = simulation_grid(scen.d, scenario.horizon, grid_points);
  try {
    auto result = bandwidth_search(scenario.sim, which, candidates, n_reps, grid, fit_cfg);
    write_bandwidth_profile(result, which, out_path);
    std::printf("selected bandwidth %s (profile in %s)\n", format_real(result.best).c_str(),
                out_path.c_str());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"additive hazard smooth backfitting"};
  app.require_subcommand(1);

  std::string config_path, out_path, data_path;

  auto* simulate = app.add_subcommand("simulate", "generate a synthetic dataset CSV");
  simulate->add_option("--config", config_path, "scenario config file")->required();
  simulate->add_option("--out", out_path, "output CSV path")->required();

  auto* fit = app.add_subcommand("fit", "fit one dataset and write a fit file");
  fit->add_option("--data", data_path, "dataset CSV")->required();
  fit->add_option("--config", config_path, "fit config file")->required();
  fit->add_option("--out", out_path, "output fit file")->required();

  auto* mc = app.add_subcommand("mc-study", "Monte Carlo study over fresh datasets");
  mc->add_option("--config", config_path, "study config file")->required();
  mc->add_option("--out", out_path, "output report path")->required();

  auto* search = app.add_subcommand("bandwidth-search", "grid search for the MISE bandwidth");
  search->add_option("--config", config_path, "search config file")->required();
  search->add_option("--out", out_path, "output profile path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return run_simulate(config_path, out_path);
    if (fit->parsed()) return run_fit(data_path, config_path, out_path);
    if (mc->parsed()) return run_mc_study(config_path, out_path);
    if (search->parsed()) return run_bandwidth_search(config_path, out_path);
  } catch (const hazsbf::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const hazsbf::InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
