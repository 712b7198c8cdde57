#include "hazsbf/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "hazsbf/classical_backfit.hpp"
#include "hazsbf/marginals.hpp"
#include "hazsbf/sbf_local_constant.hpp"
#include "hazsbf/sbf_local_linear.hpp"
#include "hazsbf/util.hpp"

namespace hazsbf {

namespace {

constexpr std::uint64_t kRepTag = 0x5245500000000000ULL;   // replication seeds
constexpr std::uint64_t kRefTag = 0x5245460000000000ULL;   // reference sample

double truth_component(const TrueHazard& truth, int k, double x) {
  return k == 0 ? truth.baseline(x) : truth.component(k, x);
}

// centering constant of the true component in the fit's gauge
double truth_centering(const AdditiveFit& fit, const TrueHazard& truth, int k) {
  const auto& g = fit.grid.dims[k];
  double num = 0.0, den = 0.0;
  for (int i = 0; i < g.n_points; ++i) {
    double w = g.trap_weight(i) * fit.centering_weights[k][i];
    num += w * truth_component(truth, k, g.point(i));
    den += w;
  }
  return den > 0.0 ? num / den : 0.0;
}

double eval_point(const Dataset& data, int rec, int k) {
  return k == 0 ? data.records[rec].exit_time : data.records[rec].covariates[k - 1].param;
}

struct RepOutcome {
  bool converged = false;
  std::vector<double> mise;                  // per component
  std::vector<std::vector<double>> at_ref;   // per component, at reference points
};

AdditiveFit run_estimator(Estimator which, const Dataset& data, const EvaluationGrid& grid,
                          const FitConfig& cfg, const LcMarginals* lc, const LlMarginals* ll) {
  switch (which) {
    case Estimator::LocalConstantSbf: return lc_fit(*lc, grid, cfg);
    case Estimator::LocalLinearSbf: return ll_fit(*ll, grid, cfg);
    case Estimator::LocalConstantClassic: return classic_lc_fit(data, *lc, grid, cfg);
    case Estimator::LocalLinearClassic: return classic_ll_fit(data, *ll, grid, cfg);
  }
  throw std::logic_error("run_estimator: unknown estimator");
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(splitmix64(seed) ^ splitmix64(tag));
}

std::string scenario_digest(const SimConfig& s, double horizon) {
  std::ostringstream os;
  os << "d=" << s.d << " n=" << s.n << " rho=" << s.rho << " seed=" << s.seed
     << " horizon=" << horizon;
  return os.str();
}

double component_mise(const AdditiveFit& fit, const TrueHazard& truth, const Dataset& data,
                      int k) {
  double c = truth_centering(fit, truth, k);
  const auto& g = fit.grid.dims[k];
  double acc = 0.0;
  for (int rec = 0; rec < data.n(); ++rec) {
    double x = std::clamp(eval_point(data, rec, k), g.lo, g.hi);
    double fitted = interpolate(g, fit.components[k], x);
    double target = truth_component(truth, k, x) - c;
    double diff = fitted - target;
    acc += diff * diff;
  }
  return acc / data.n();
}

std::vector<EvalReport> mc_study(const SimConfig& scenario,
                                 const std::vector<Estimator>& estimators, double bandwidth,
                                 int n_reps, const EvaluationGrid& grid,
                                 const FitConfig& base_config) {
  if (estimators.empty()) throw std::invalid_argument("mc_study: no estimators");
  if (n_reps < 1) throw std::invalid_argument("mc_study: n_reps must be >= 1");
  check_sim_config(scenario);

  SimConfig scen = scenario;
  if (scen.horizon <= 0.0) scen.horizon = calibrate_horizon(scen);
  const int nd = grid.n_dims();

  FitConfig cfg = base_config;
  cfg.bandwidth = {bandwidth};
  cfg.threads = 1;  // replications are the parallel unit
  check_fit_config(cfg, grid);

  bool need_lc = false, need_lc_pairs = false, need_ll = false, need_ll_pairs = false;
  for (Estimator e : estimators) {
    if (e == Estimator::LocalConstantSbf) need_lc = need_lc_pairs = true;
    if (e == Estimator::LocalConstantClassic) need_lc = true;
    if (e == Estimator::LocalLinearSbf) need_ll = need_ll_pairs = true;
    if (e == Estimator::LocalLinearClassic) need_ll = true;
  }

  // fixed reference sample, independent of n_reps
  SimConfig ref_cfg = scen;
  ref_cfg.n = kReferenceSampleSize;
  ref_cfg.seed = derive_seed(scen.seed, kRefTag);
  SimulatedData ref = simulate_dataset(ref_cfg);
  std::vector<std::vector<double>> ref_points(nd);
  for (int k = 0; k < nd; ++k) {
    ref_points[k].resize(ref.data.n());
    for (int i = 0; i < ref.data.n(); ++i)
      ref_points[k][i] = std::clamp(eval_point(ref.data, i, k), grid.dims[k].lo,
                                    grid.dims[k].hi);
  }

  const std::size_t n_est = estimators.size();
  std::vector<std::vector<RepOutcome>> outcomes(n_est);
  for (auto& v : outcomes) v.resize(n_reps);

  parallel_for(static_cast<std::size_t>(n_reps), scenario.threads, [&](std::size_t rep) {
    SimConfig rep_cfg = scen;
    rep_cfg.seed = derive_seed(scen.seed, kRepTag + rep);
    rep_cfg.threads = 1;
    SimulatedData sim = simulate_dataset(rep_cfg);
    auto validated = validate_dataset(sim.data, grid);
    const Dataset& data = validated.data;

    LcMarginals lc;
    LlMarginals ll;
    if (need_lc) lc = build_lc_marginals(data, grid, cfg, need_lc_pairs && nd > 1);
    if (need_ll) ll = build_ll_marginals(data, grid, cfg, need_ll_pairs && nd > 1);

    for (std::size_t e = 0; e < n_est; ++e) {
      AdditiveFit fit = run_estimator(estimators[e], data, grid, cfg, &lc, &ll);
      RepOutcome& out = outcomes[e][rep];
      out.converged = fit.converged && !fit.diverged;
      if (!out.converged) continue;
      out.mise.resize(nd);
      out.at_ref.resize(nd);
      for (int k = 0; k < nd; ++k) {
        out.mise[k] = component_mise(fit, sim.truth, data, k);
        out.at_ref[k].resize(ref.data.n());
        for (int i = 0; i < ref.data.n(); ++i)
          out.at_ref[k][i] = interpolate(grid.dims[k], fit.components[k], ref_points[k][i]);
      }
    }
  });

  std::vector<EvalReport> reports(n_est);
  for (std::size_t e = 0; e < n_est; ++e) {
    EvalReport& rep = reports[e];
    rep.estimator = estimators[e];
    rep.n_reps = n_reps;
    rep.bandwidth = bandwidth;
    rep.scenario_digest = scenario_digest(scen, scen.horizon);
    rep.per_component.assign(nd, ComponentMetrics{});
    std::vector<int> used;
    for (int r = 0; r < n_reps; ++r)
      if (outcomes[e][r].converged) used.push_back(r);
    rep.n_converged = static_cast<int>(used.size());
    if (used.empty()) {
      for (auto& m : rep.per_component)
        m = {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(),
             std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
      continue;
    }

    const int n_pts = ref.data.n();
    for (int k = 0; k < nd; ++k) {
      double mise = 0.0;
      for (int r : used) mise += outcomes[e][r].mise[k];
      rep.per_component[k].mise = mise / used.size();

      // decomposition on the reference sample: both the fitted curves and the
      // truth are recentered to plain zero mean over the sample so gauges align
      std::vector<double> truth_vals(n_pts);
      double t_mean = 0.0;
      for (int i = 0; i < n_pts; ++i) {
        truth_vals[i] = truth_component(ref.truth, k, ref_points[k][i]);
        t_mean += truth_vals[i];
      }
      t_mean /= n_pts;
      for (double& v : truth_vals) v -= t_mean;

      std::vector<double> mean_curve(n_pts, 0.0);
      std::vector<std::vector<double>> centered(used.size());
      for (std::size_t ui = 0; ui < used.size(); ++ui) {
        const auto& vals = outcomes[e][used[ui]].at_ref[k];
        double m = 0.0;
        for (double v : vals) m += v;
        m /= n_pts;
        centered[ui].resize(n_pts);
        for (int i = 0; i < n_pts; ++i) {
          centered[ui][i] = vals[i] - m;
          mean_curve[i] += centered[ui][i];
        }
      }
      for (double& v : mean_curve) v /= used.size();

      double bias_sq = 0.0, variance = 0.0;
      for (int i = 0; i < n_pts; ++i) {
        double b = mean_curve[i] - truth_vals[i];
        bias_sq += b * b;
        for (std::size_t ui = 0; ui < used.size(); ++ui) {
          double dv = centered[ui][i] - mean_curve[i];
          variance += dv * dv;
        }
      }
      rep.per_component[k].bias_sq = bias_sq / n_pts;
      rep.per_component[k].variance = variance / (n_pts * used.size());
      rep.per_component[k].mise_ref =
          rep.per_component[k].bias_sq + rep.per_component[k].variance;
    }
  }
  return reports;
}

BandwidthSearchResult bandwidth_search(const SimConfig& scenario, Estimator estimator,
                                       const std::vector<double>& candidates, int n_reps,
                                       const EvaluationGrid& grid,
                                       const FitConfig& base_config) {
  if (candidates.size() < 2)
    throw std::invalid_argument("bandwidth_search: need at least two candidates");
  SimConfig scen = scenario;
  if (scen.horizon <= 0.0) scen.horizon = calibrate_horizon(scen);

  BandwidthSearchResult out;
  out.candidates = candidates;
  out.score.reserve(candidates.size());
  for (double h : candidates) {
    auto reports = mc_study(scen, {estimator}, h, n_reps, grid, base_config);
    const EvalReport& rep = reports[0];
    double score = 0.0;
    if (rep.is_na()) {
      score = std::numeric_limits<double>::infinity();
    } else if (grid.covariate_dim() == 0) {
      score = rep.per_component[0].mise;
    } else {
      for (int k = 1; k < grid.n_dims(); ++k) score += rep.per_component[k].mise;
    }
    out.score.push_back(score);
    out.reports.push_back(std::move(reports));
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i)
    if (out.score[i] < out.score[best]) best = i;
  if (!std::isfinite(out.score[best]))
    throw std::runtime_error("bandwidth_search: no candidate produced a converged fit");
  out.best = candidates[best];
  return out;
}

}  // namespace hazsbf
