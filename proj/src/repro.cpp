#include "hazsbf/repro.hpp"

#include <algorithm>
#include <cmath>

#include "hazsbf/io.hpp"

namespace hazsbf {

std::vector<double> table1_candidates(Estimator estimator, int n, double horizon) {
  bool local_linear = estimator == Estimator::LocalLinearSbf ||
                      estimator == Estimator::LocalLinearClassic;
  // anchors tuned at n = 5000; local constant needs much smaller bandwidths
  // than local linear on this design
  std::vector<double> base = local_linear
                                 ? std::vector<double>{0.12, 0.16, 0.21, 0.27, 0.35}
                                 : std::vector<double>{0.055, 0.075, 0.10, 0.135, 0.18};
  double scale = std::pow(5000.0 / n, 0.2);
  double cap = 0.49 * std::min(horizon, 2.0 * kCovariateHalfWidth);
  std::vector<double> out;
  for (double b : base) {
    double h = std::min(b * scale, cap);
    if (out.empty() || h > out.back() + 1e-12) out.push_back(h);
  }
  return out;
}

Table1Cell run_table1_cell(const SimConfig& scenario, const std::vector<Estimator>& estimators,
                           int search_reps, int final_reps, int grid_points,
                           const FitConfig& base_config) {
  Table1Cell cell;
  cell.scenario = scenario;
  cell.scenario.horizon =
      scenario.horizon > 0.0 ? scenario.horizon : calibrate_horizon(scenario);
  cell.horizon = cell.scenario.horizon;
  auto grid = simulation_grid(scenario.d, cell.horizon, grid_points);

  for (Estimator est : estimators) {
    Table1Entry entry;
    entry.estimator = est;
    auto candidates = table1_candidates(est, scenario.n, cell.horizon);
    auto search =
        bandwidth_search(cell.scenario, est, candidates, search_reps, grid, base_config);
    entry.bandwidth = search.best;
    entry.report =
        mc_study(cell.scenario, {est}, entry.bandwidth, final_reps, grid, base_config)[0];
    cell.entries.push_back(std::move(entry));
  }
  return cell;
}

double headline_mise(const Table1Entry& entry) {
  int k = entry.report.per_component.size() > 1 ? 1 : 0;
  return entry.report.per_component[k].mise;
}

void write_table1_cell(const Table1Cell& cell, const std::string& path) {
  std::vector<EvalReport> reports;
  for (const auto& e : cell.entries) reports.push_back(e.report);
  StudyScenario scenario{cell.scenario, cell.horizon};
  write_mc_report(reports, scenario, path);
}

}  // namespace hazsbf
