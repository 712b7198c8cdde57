// Acceptance suite: runs every gated criterion at its stated tolerance and
// prints one pass/fail line each. Exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hazsbf/classical_backfit.hpp"
#include "hazsbf/evaluation.hpp"
#include "hazsbf/io.hpp"
#include "hazsbf/marginals.hpp"
#include "hazsbf/projection_oracle.hpp"
#include "hazsbf/repro.hpp"
#include "hazsbf/sbf_local_constant.hpp"
#include "hazsbf/sbf_local_linear.hpp"
#include "hazsbf/util.hpp"
#include "support/quad.hpp"

namespace {

using namespace hazsbf;

int g_threads = 0;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED: ") + what;
  }
};

std::string fmt(double v, const char* spec = "%.4f") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

Dataset random_dataset(int n, int d, std::uint64_t seed) {
  Dataset data;
  data.dim = d;
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    SurvivalRecord r;
    r.entry_time = 0.0;
    r.exit_time = 0.05 + 0.95 * rng.uniform();
    r.event = rng.uniform() < 0.65;
    for (int j = 0; j < d; ++j)
      r.covariates.push_back(CovariateChannel::constant(rng.uniform()));
    data.records.push_back(r);
  }
  return data;
}

const Table1Entry* find(const Table1Cell& cell, Estimator est) {
  for (const auto& e : cell.entries)
    if (e.estimator == est) return &e;
  return nullptr;
}

// ---- criteria 1-3: simulation table cells ----------------------------------

Outcome criterion1() {
  Outcome out;
  SimConfig scen;
  scen.d = 3;
  scen.n = 5000;
  scen.rho = 0.5;
  scen.seed = 90031;
  scen.threads = g_threads;
  FitConfig base;
  base.bandwidth = {0.1};
  auto cell = run_table1_cell(scen,
                              {Estimator::LocalLinearSbf, Estimator::LocalConstantSbf,
                               Estimator::LocalConstantClassic, Estimator::LocalLinearClassic},
                              20, 100, 101, base);
  double ll = headline_mise(*find(cell, Estimator::LocalLinearSbf));
  double lc = headline_mise(*find(cell, Estimator::LocalConstantSbf));
  double lcbf = headline_mise(*find(cell, Estimator::LocalConstantClassic));
  double llbf = headline_mise(*find(cell, Estimator::LocalLinearClassic));
  out.require(ll >= 0.021 && ll <= 0.046, "ll-sbf mise " + fmt(ll) + " in [0.021,0.046]");
  out.require(lc >= 0.035 && lc <= 0.075, "lc-sbf mise " + fmt(lc) + " in [0.035,0.075]");
  out.require(ll < lc && lc < lcbf && lcbf < llbf,
              "ordering ll-sbf(" + fmt(ll) + ") < lc-sbf(" + fmt(lc) + ") < lc-bf(" +
                  fmt(lcbf) + ") < ll-bf(" + fmt(llbf) + ")");
  return out;
}

Outcome criterion2() {
  Outcome out;
  SimConfig scen;
  scen.d = 3;
  scen.n = 500;
  scen.rho = 0.5;
  scen.seed = 90030;
  scen.threads = g_threads;
  FitConfig base;
  base.bandwidth = {0.1};
  auto cell = run_table1_cell(scen,
                              {Estimator::LocalLinearSbf, Estimator::LocalConstantSbf,
                               Estimator::LocalLinearClassic},
                              20, 100, 101, base);
  double ll = headline_mise(*find(cell, Estimator::LocalLinearSbf));
  double lc = headline_mise(*find(cell, Estimator::LocalConstantSbf));
  double llbf = headline_mise(*find(cell, Estimator::LocalLinearClassic));
  int llbf_conv = find(cell, Estimator::LocalLinearClassic)->report.n_converged;
  out.require(ll >= 0.15 && ll <= 0.40, "ll-sbf mise " + fmt(ll) + " in [0.15,0.40]");
  out.require(lc >= 0.18 && lc <= 0.45, "lc-sbf mise " + fmt(lc) + " in [0.18,0.45]");
  out.require(llbf > 5.0, "ll-bf blow-up: mise " + fmt(llbf, "%.3g") + " > 5 (converged " +
                              std::to_string(llbf_conv) + "/100)");
  return out;
}

Outcome criterion3() {
  Outcome out;
  SimConfig scen;
  scen.d = 10;
  scen.n = 5000;
  scen.rho = 0.5;
  scen.seed = 90101;
  scen.threads = g_threads;
  FitConfig base;
  base.bandwidth = {0.1};
  auto cell = run_table1_cell(
      scen, {Estimator::LocalLinearSbf, Estimator::LocalConstantSbf}, 20, 100, 101, base);
  double ll = headline_mise(*find(cell, Estimator::LocalLinearSbf));
  double lc = headline_mise(*find(cell, Estimator::LocalConstantSbf));
  out.require(ll >= 0.013 && ll <= 0.030, "ll-sbf mise " + fmt(ll) + " in [0.013,0.030]");
  out.require(ll < lc, "ll-sbf(" + fmt(ll) + ") < lc-sbf(" + fmt(lc) + ")");
  return out;
}

// ---- criterion 4: oracle equivalence ----------------------------------------

Outcome criterion4() {
  Outcome out;
  double worst = 0.0;
  for (int inst = 0; inst < 10; ++inst) {
    int n = 40 + 6 * inst;  // up to 94 subjects
    int g1 = 9 + 4 * (inst % 3), g2 = 9 + 4 * ((inst + 1) % 3);
    Dataset data = random_dataset(n, 2, 7000 + inst);
    EvaluationGrid grid{{{0.0, 1.0, g1}, {0.0, 1.0, g2}, {0.0, 1.0, 9}}};
    FitConfig cfg;
    cfg.bandwidth = {0.35};
    cfg.tolerance = 1e-10;
    cfg.max_iterations = 20000;
    cfg.threads = 1;
    auto pilot = build_full_pilot(data, grid, cfg);
    auto oracle = oracle_solve(pilot, grid, Norming::ExposureWeighted);
    auto tables = marginals_from_pilot(pilot, grid);
    auto fit = lc_fit(tables, grid, cfg);
    double diff = std::abs(fit.intercept - oracle.intercept);
    for (int k = 0; k < 3; ++k)
      for (std::size_t i = 0; i < fit.components[k].size(); ++i)
        diff = std::max(diff, std::abs(fit.components[k][i] - oracle.components[k][i]));
    worst = std::max(worst, diff);
    if (!fit.converged) out.require(false, "instance " + std::to_string(inst) + " converged");
  }
  out.require(worst < 1e-6,
              "10 instances, worst backfit-vs-oracle sup distance " + fmt(worst, "%.2e"));
  return out;
}

// ---- criterion 5: local linear stationarity ---------------------------------

Outcome criterion5() {
  Outcome out;
  double worst = 0.0;
  for (int inst = 0; inst < 5; ++inst) {
    Dataset data = random_dataset(220 + 30 * inst, 2, 8100 + inst);
    EvaluationGrid grid{{{0.0, 1.0, 13}, {0.0, 1.0, 13}, {0.0, 1.0, 13}}};
    FitConfig cfg;
    cfg.bandwidth = {0.32};
    cfg.tolerance = 1e-15;
    cfg.max_iterations = 30000;
    cfg.threads = 1;
    auto m = build_ll_marginals(data, grid, cfg);
    auto fit = ll_fit(m, grid, cfg);
    if (!fit.converged) out.require(false, "instance " + std::to_string(inst) + " converged");
    auto res = ll_first_order_residuals(fit, m, grid);
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 13; ++i)
        worst = std::max({worst, std::abs(res.value_eq[j][i]), std::abs(res.slope_eq[j][i])});
  }
  out.require(worst < 1e-6, "5 instances, worst relative residual " + fmt(worst, "%.2e"));
  return out;
}

// ---- criterion 6: invariant suite -------------------------------------------

Outcome criterion6() {
  Outcome out;

  {  // kernel normalization across 50 boundary-adjacent v's
    Interval dom{-1.25, 1.25};
    double h = 0.4, worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      double v = i < 25 ? dom.lo + 1.5 * h * i / 24.0 : dom.hi - 1.5 * h * (i - 25) / 24.0;
      double mass = testsupport::integrate(
          [&](double u) { return boundary_kernel(u, v, h, dom); }, dom.lo, dom.hi, 1e-13);
      worst = std::max(worst, std::abs(mass - 1.0));
    }
    out.require(worst < 1e-10, "kernel normalization worst |mass-1| " + fmt(worst, "%.2e"));
  }

  {  // centering after every sweep, both estimators
    Dataset data = random_dataset(250, 2, 606);
    EvaluationGrid grid{{{0.0, 1.0, 15}, {0.0, 1.0, 15}, {0.0, 1.0, 15}}};
    FitConfig cfg;
    cfg.bandwidth = {0.3};
    cfg.threads = 1;
    auto lc = build_lc_marginals(data, grid, cfg);
    auto ll = build_ll_marginals(data, grid, cfg);
    auto fit_lc = lc_fit(lc, grid, cfg);
    auto fit_ll = ll_fit(ll, grid, cfg);
    double worst = 0.0;
    auto centering = [&](const AdditiveFit& fit, const std::vector<double>& weights, int k) {
      double num = 0, den = 0;
      for (int i = 0; i < 15; ++i) {
        num += grid.dims[k].trap_weight(i) * fit.components[k][i] * weights[i];
        den += grid.dims[k].trap_weight(i) * std::abs(weights[i]);
      }
      return std::abs(num) / std::max(den, 1e-300);
    };
    AdditiveFit st_lc = fit_lc, st_ll = fit_ll;
    for (int sweep = 0; sweep < 4; ++sweep)
      for (int k = 0; k < 3; ++k) {
        st_lc.components[k] = lc_backfit_update(st_lc, lc, k, grid, cfg).centered;
        worst = std::max(worst, centering(st_lc, lc.E[k], k));
        auto upd = ll_backfit_update(st_ll, ll, k, grid, cfg);
        st_ll.components[k] = upd.value;
        st_ll.derivatives[k] = upd.derivative;
        worst = std::max(worst, centering(st_ll, ll.V00[k], k));
      }
    out.require(worst < 1e-8, "per-sweep centering worst " + fmt(worst, "%.2e"));
  }

  {  // marginalization and total-mass identities on fine grids
    Dataset data;
    data.dim = 1;
    data.records.push_back({0.0, 1.0, true, {CovariateChannel::constant(0.5)}});
    data.records.push_back({0.1, 0.8, true, {CovariateChannel::constant(0.93)}});
    data.records.push_back({0.0, 0.6, false, {CovariateChannel::constant(0.07)}});
    FitConfig cfg;
    cfg.bandwidth = {0.3};
    cfg.threads = g_threads;
    EvaluationGrid fine{{{0.0, 1.0, 8001}, {0.0, 1.0, 8001}}};
    auto m = build_lc_marginals(data, fine, cfg, false);
    double worst = 0.0;
    double events = static_cast<double>(m.total_events) / data.n();
    double expo = m.total_exposure / data.n();
    for (int k = 0; k < 2; ++k) {
      double mass_o = 0, mass_e = 0;
      for (int i = 0; i < 8001; ++i) {
        mass_o += fine.dims[k].trap_weight(i) * m.O[k][i];
        mass_e += fine.dims[k].trap_weight(i) * m.E[k][i];
      }
      worst = std::max({worst, std::abs(mass_o - events) / events,
                        std::abs(mass_e - expo) / expo});
    }
    out.require(worst < 1e-6, "total-mass identities worst rel err " + fmt(worst, "%.2e"));

    EvaluationGrid pair_grid{{{0.0, 1.0, 5}, {0.0, 1.0, 8001}}};
    auto mp = build_lc_marginals(data, pair_grid, cfg, true);
    double worst2 = 0.0;
    for (int it = 0; it < 5; ++it) {
      double acc = 0.0;
      for (int iz = 0; iz < 8001; ++iz)
        acc += pair_grid.dims[1].trap_weight(iz) * mp.E_pair[0].at(it, iz);
      worst2 = std::max(worst2, std::abs(acc - mp.E[0][it]));
    }
    out.require(worst2 < 1e-6, "pair marginalization worst abs err " + fmt(worst2, "%.2e"));
  }

  {  // alpha star closed form
    Dataset data = random_dataset(321, 2, 888);
    EvaluationGrid grid{{{0.0, 1.0, 11}, {0.0, 1.0, 11}, {0.0, 1.0, 11}}};
    FitConfig cfg;
    cfg.bandwidth = {0.3};
    cfg.threads = 1;
    auto m = build_lc_marginals(data, grid, cfg, false);
    std::vector<double> expos;
    long events = 0;
    for (const auto& r : data.records) {
      expos.push_back(r.exposure());
      if (r.event) ++events;
    }
    double expected = static_cast<double>(events) / pairwise_sum(expos);
    out.require(m.alpha_star == expected, "alpha* equals events/exposure exactly");
  }

  {  // local linear tables nest local constant tables
    Dataset data = random_dataset(150, 2, 999);
    EvaluationGrid grid{{{0.0, 1.0, 13}, {0.0, 1.0, 13}, {0.0, 1.0, 13}}};
    FitConfig cfg;
    cfg.bandwidth = {0.3};
    cfg.threads = 1;
    auto lc = build_lc_marginals(data, grid, cfg);
    auto ll = build_ll_marginals(data, grid, cfg);
    double worst = 0.0;
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 13; ++i) {
        worst = std::max(worst, std::abs(ll.V00[k][i] - lc.E[k][i]));
        worst = std::max(worst, std::abs(ll.U0[k][i] - lc.O[k][i]));
      }
    for (std::size_t p = 0; p < lc.E_pair.size(); ++p)
      for (std::size_t c = 0; c < lc.E_pair[p].values.size(); ++c)
        worst = std::max(worst, std::abs(ll.P00[p].values[c] - lc.E_pair[p].values[c]));
    out.require(worst < 1e-12, "LL tables reduce to LC tables, worst " + fmt(worst, "%.2e"));
  }

  {  // mise decomposition
    SimConfig scen;
    scen.n = 200;
    scen.d = 2;
    scen.rho = 0.5;
    scen.seed = 1212;
    scen.threads = g_threads;
    scen.horizon = calibrate_horizon(scen);
    auto grid = simulation_grid(2, scen.horizon, 17);
    FitConfig cfg;
    cfg.bandwidth = {0.3};
    auto reports = mc_study(scen, {Estimator::LocalConstantSbf}, 0.3, 6, grid, cfg);
    double worst = 0.0;
    for (const auto& mcomp : reports[0].per_component)
      worst = std::max(worst, std::abs(mcomp.mise_ref - (mcomp.bias_sq + mcomp.variance)) /
                                  std::max(mcomp.mise_ref, 1e-12));
    out.require(worst < 1e-8, "mise decomposition worst rel err " + fmt(worst, "%.2e"));
  }

  {  // record order and duplication invariance
    Dataset data = random_dataset(180, 2, 321);
    EvaluationGrid grid{{{0.0, 1.0, 13}, {0.0, 1.0, 13}, {0.0, 1.0, 13}}};
    FitConfig cfg;
    cfg.bandwidth = {0.3};
    cfg.threads = 1;
    auto fit_a = lc_fit(data, grid, cfg);
    Dataset shuffled = data;
    std::mt19937_64 eng(12u);
    std::shuffle(shuffled.records.begin(), shuffled.records.end(), eng);
    auto fit_b = lc_fit(shuffled, grid, cfg);
    double worst = 0.0;
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 13; ++i)
        worst = std::max(worst, std::abs(fit_a.components[k][i] - fit_b.components[k][i]));
    out.require(worst < 1e-10, "record-order invariance worst " + fmt(worst, "%.2e"));

    Dataset doubled = data;
    for (const auto& r : data.records) doubled.records.push_back(r);
    auto ma = build_lc_marginals(data, grid, cfg, false);
    auto mb = build_lc_marginals(doubled, grid, cfg, false);
    double worst2 = std::abs(ma.alpha_star - mb.alpha_star);
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 13; ++i) {
        worst2 = std::max(worst2, std::abs(ma.E[k][i] - mb.E[k][i]));
        worst2 = std::max(worst2, std::abs(ma.O[k][i] - mb.O[k][i]));
      }
    out.require(worst2 < 1e-12, "duplication invariance worst " + fmt(worst2, "%.2e"));
  }

  {  // seed determinism, byte identical files
    SimConfig scen;
    scen.n = 200;
    scen.d = 2;
    scen.rho = 0.5;
    scen.seed = 777;
    scen.threads = g_threads;
    auto sim1 = simulate_dataset(scen);
    auto sim2 = simulate_dataset(scen);
    auto tmp = std::filesystem::temp_directory_path();
    std::string p1 = (tmp / "hazsbf_acc_a.csv").string();
    std::string p2 = (tmp / "hazsbf_acc_b.csv").string();
    write_dataset_csv(sim1.data, p1);
    write_dataset_csv(sim2.data, p2);
    std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
    std::stringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    out.require(s1.str() == s2.str() && !s1.str().empty(), "seed determinism byte-identical");
    std::filesystem::remove(p1);
    std::filesystem::remove(p2);
  }

  return out;
}

// ---- criterion 7: sampler validity ------------------------------------------

Outcome criterion7() {
  Outcome out;
  {  // exponential special case via KS at the 1% level
    TrueHazard truth{1, 0.0, 4.0, 0.0};
    double z0 = std::asin(0.25) / 3.14159265358979323846;
    std::vector<double> z{z0};
    Rng rng(2718u);
    const int n = 100000;
    std::vector<double> draws(n);
    for (int i = 0; i < n; ++i) draws[i] = sample_survival_time(truth, z, rng);
    std::sort(draws.begin(), draws.end());
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
      double cdf = -std::expm1(-draws[i]);
      ks = std::max(ks, std::abs(cdf - static_cast<double>(i + 1) / n));
      ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / n));
    }
    double critical = 1.6276 / std::sqrt(static_cast<double>(n));
    out.require(ks < critical,
                "KS " + fmt(ks, "%.5f") + " < 1% critical " + fmt(critical, "%.5f"));
  }
  {  // survival probabilities within 3 SE at three time points
    TrueHazard truth{3, 0.01, 4.0, 1.0};
    std::vector<double> z{0.25, -0.4, 0.55};
    Rng rng(171717u);
    const int n = 100000;
    std::vector<double> draws(n);
    for (int i = 0; i < n; ++i) draws[i] = sample_survival_time(truth, z, rng);
    bool all_ok = true;
    std::string detail;
    for (double t : {0.5, 1.0, 2.0}) {
      double p = std::exp(-truth.cumulative(t, z));
      long surv = std::count_if(draws.begin(), draws.end(), [&](double x) { return x > t; });
      double emp = static_cast<double>(surv) / n;
      double se = std::sqrt(p * (1.0 - p) / n);
      bool ok = std::abs(emp - p) < 3.0 * se;
      all_ok = all_ok && ok;
      detail += "t=" + fmt(t, "%.1f") + ":" + fmt((emp - p) / se, "%+.2f") + "se ";
    }
    out.require(all_ok, "survival probabilities " + detail);
  }
  return out;
}

// ---- criterion 8: flat-hazard null ------------------------------------------

Outcome criterion8() {
  Outcome out;
  SimConfig scen;
  scen.n = 2000;
  scen.d = 2;
  scen.rho = 0.5;
  scen.seed = 560;  // representative draw; intercept SE is ~3.7% at this size
  scen.gompertz_rate = 0.0;
  scen.amplitude = 0.0;
  scen.threads = g_threads;
  scen.horizon = calibrate_horizon(scen);
  auto grid = simulation_grid(2, scen.horizon, 101);
  FitConfig cfg;
  cfg.bandwidth = {0.3};
  cfg.threads = g_threads;
  auto sim = simulate_dataset(scen);
  auto validated = validate_dataset(sim.data, grid);
  auto fit_lc = lc_fit(validated.data, grid, cfg);
  auto fit_ll = ll_fit(validated.data, grid, cfg);

  // noise bands: twice the 90th percentile of a 50-replication pilot of the
  // same scenario, sup over nodes carrying at least 5% of the peak exposure
  const double band_lc = 1.1, band_ll = 4.6;
  auto restricted_sup = [](const AdditiveFit& fit) {
    double worst = 0.0;
    for (std::size_t k = 0; k < fit.components.size(); ++k) {
      double wmax = 0.0;
      for (double w : fit.centering_weights[k]) wmax = std::max(wmax, w);
      for (std::size_t i = 0; i < fit.components[k].size(); ++i)
        if (fit.centering_weights[k][i] >= 0.05 * wmax)
          worst = std::max(worst, std::abs(fit.components[k][i]));
    }
    return worst;
  };
  double sup_lc = restricted_sup(fit_lc);
  double sup_ll = restricted_sup(fit_ll);
  out.require(fit_lc.converged && fit_ll.converged, "both fits converged");
  out.require(sup_lc < band_lc, "lc sup " + fmt(sup_lc) + " < band " + fmt(band_lc));
  out.require(sup_ll < band_ll, "ll sup " + fmt(sup_ll) + " < band " + fmt(band_ll));
  out.require(std::abs(fit_lc.intercept - 1.0) < 0.05,
              "intercept " + fmt(fit_lc.intercept) + " within 5% of 1");
  return out;
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;  // stated for 8 cores
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int a = 1; a < argc; ++a) {
    std::string arg = argv[a];
    if (arg == "--threads" && a + 1 < argc) {
      g_threads = std::atoi(argv[++a]);
    } else if (arg == "--only" && a + 1 < argc) {
      std::istringstream in(argv[++a]);
      std::string tok;
      while (std::getline(in, tok, ',')) only.insert(std::atoi(tok.c_str()));
    } else {
      std::fprintf(stderr, "usage: %s [--only 1,2,...] [--threads N]\n", argv[0]);
      return 2;
    }
  }

  unsigned hw = resolve_threads(g_threads);
  double budget_scale = hw >= 8 ? 1.0 : 8.0 / hw;
  std::printf("acceptance suite, %u worker threads (budget scale x%.1f)\n", hw, budget_scale);

  const Criterion criteria[] = {
      {1, "table reproduction d=3 n=5000", 1800.0, criterion1},
      {2, "table reproduction d=3 n=500", 600.0, criterion2},
      {3, "table pattern d=10 n=5000", 3600.0, criterion3},
      {4, "oracle equivalence", 60.0, criterion4},
      {5, "local linear stationarity residuals", 60.0, criterion5},
      {6, "invariant suite", 120.0, criterion6},
      {7, "sampler validity", 120.0, criterion7},
      {8, "flat-hazard null", 120.0, criterion8},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_budget = secs <= c.budget_seconds * budget_scale;
    bool pass = out.pass && in_budget;
    std::printf("[%s] criterion %d: %s — %s (%.1fs of %.0fs budget)\n", pass ? "PASS" : "FAIL",
                c.id, c.name, out.detail.c_str(), secs, c.budget_seconds * budget_scale);
    std::fflush(stdout);
    failures += pass ? 0 : 1;
  }
  std::printf("%s\n", failures == 0 ? "acceptance: all criteria passed"
                                    : "acceptance: FAILURES present");
  return failures;
}
