// Micro-benchmarks for the fitting pipeline: marginal-table build time versus
// n (expected ~linear) and backfitting sweep time versus grid size (expected
// ~quadratic). --assert turns the log-log slope checks into the exit status.

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "hazsbf/marginals.hpp"
#include "hazsbf/sbf_local_constant.hpp"
#include "hazsbf/simulation.hpp"

namespace {

using namespace hazsbf;

double time_median3(const std::function<void()>& fn) {
  double best[3];
  for (int rep = 0; rep < 3; ++rep) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    best[rep] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  // median of three
  double lo = std::min({best[0], best[1], best[2]});
  double hi = std::max({best[0], best[1], best[2]});
  return best[0] + best[1] + best[2] - lo - hi;
}

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += std::log(xs[i]);
    my += std::log(ys[i]);
  }
  mx /= xs.size();
  my /= xs.size();
  double num = 0, den = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    num += (std::log(xs[i]) - mx) * (std::log(ys[i]) - my);
    den += (std::log(xs[i]) - mx) * (std::log(xs[i]) - mx);
  }
  return num / den;
}

Dataset make_data(int n, int d, std::uint64_t seed) {
  SimConfig scen;
  scen.n = n;
  scen.d = d;
  scen.rho = 0.5;
  scen.seed = seed;
  scen.horizon = 1.0;
  scen.threads = 1;
  return simulate_dataset(scen).data;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fitting micro-benchmarks"};
  bool do_assert = false;
  bool include_large = false;
  int threads = 1;
  std::string out_path = "bench_timings.tsv";
  app.add_flag("--assert", do_assert, "fail on order-of-growth violations");
  app.add_flag("--large", include_large, "include the d=30 wall-time probe");
  app.add_option("--threads", threads, "threads for table builds");
  app.add_option("--out", out_path, "timing report path");
  CLI11_PARSE(app, argc, argv);

  std::ofstream out(out_path, std::ios::binary);
  out << "# hazsbf-bench/v1\nworkload\tparam\tseconds\n";

  FitConfig cfg;
  cfg.bandwidth = {0.2};
  cfg.threads = threads;

  // marginal build versus n at fixed d and grid
  EvaluationGrid grid_nd = simulation_grid(3, 1.0, 51);
  std::vector<double> ns{400, 1265, 4000};
  std::vector<double> build_times;
  for (double nd : ns) {
    Dataset data = make_data(static_cast<int>(nd), 3, 77);
    double secs = time_median3([&] { build_lc_marginals(data, grid_nd, cfg, true); });
    build_times.push_back(secs);
    out << "build_lc_pairs\tn=" << nd << "\t" << secs << "\n";
    std::printf("build d=3 g=51 n=%-5.0f %.4fs\n", nd, secs);
  }
  double build_slope = loglog_slope(ns, build_times);

  // sweep cost versus grid size at fixed data
  Dataset sweep_data = make_data(600, 3, 78);
  std::vector<double> gs{101, 201, 401};
  std::vector<double> sweep_times;
  for (double gd : gs) {
    int g = static_cast<int>(gd);
    EvaluationGrid grid = simulation_grid(3, 1.0, g);
    auto m = build_lc_marginals(sweep_data, grid, cfg, true);
    AdditiveFit state = lc_fit(m, grid, cfg);  // converged starting point
    int sweeps = std::max(2, static_cast<int>(3.0e7 / (12.0 * g * g)));
    double secs = time_median3([&] {
      for (int s = 0; s < sweeps; ++s)
        for (int k = 0; k < grid.n_dims(); ++k)
          state.components[k] = lc_backfit_update(state, m, k, grid, cfg).centered;
    });
    sweep_times.push_back(secs / sweeps);
    out << "lc_sweep\tg=" << g << "\t" << secs / sweeps << "\n";
    std::printf("sweep d=3 g=%-4d %.6fs/sweep (timed over %d)\n", g, secs / sweeps, sweeps);
  }
  double sweep_slope = loglog_slope(gs, sweep_times);

  out << "slope\tbuild_vs_n\t" << build_slope << "\n";
  out << "slope\tsweep_vs_g\t" << sweep_slope << "\n";
  std::printf("build slope vs n: %.2f (nominal 1)\nsweep slope vs g: %.2f (nominal 2)\n",
              build_slope, sweep_slope);

  if (include_large) {
    Dataset data = make_data(500, 30, 79);
    EvaluationGrid grid = simulation_grid(30, 1.0, 51);
    auto t0 = std::chrono::steady_clock::now();
    auto m = build_lc_marginals(data, grid, cfg, true);
    auto fit = lc_fit(m, grid, cfg);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out << "lc_fit_total\td=30,n=500,g=51\t" << secs << "\n";
    std::printf("d=30 n=500 g=51 lc fit total %.1fs (converged=%d)\n", secs,
                static_cast<int>(fit.converged));
  }

  if (do_assert) {
    bool ok = std::abs(build_slope - 1.0) <= 0.3 && std::abs(sweep_slope - 2.0) <= 0.3;
    if (!ok) {
      std::printf("order-of-growth check FAILED\n");
      return 1;
    }
    std::printf("order-of-growth checks passed\n");
  }
  return 0;
}
