// Reproduces the simulation-study table at three scales and writes per-cell
// reports plus a machine-readable verdict file for the gated rows.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "hazsbf/io.hpp"
#include "hazsbf/repro.hpp"

namespace {

using namespace hazsbf;

struct Verdict {
  std::string cell;
  std::string check;
  std::string measured;
  std::string required;
  bool pass = false;
};

struct Band {
  double lo, hi;
};

const std::vector<Estimator> kAll = {
    Estimator::LocalLinearSbf, Estimator::LocalConstantSbf, Estimator::LocalConstantClassic,
    Estimator::LocalLinearClassic};

SimConfig scenario_for(int d, int n, int threads) {
  SimConfig s;
  s.d = d;
  s.n = n;
  s.rho = 0.5;
  s.seed = 90000 + 10 * d + (n >= 5000 ? 1 : 0);
  s.threads = threads;
  return s;
}

const Table1Entry* find(const Table1Cell& cell, Estimator est) {
  for (const auto& e : cell.entries)
    if (e.estimator == est) return &e;
  return nullptr;
}

void check_band(std::vector<Verdict>& out, const Table1Cell& cell, Estimator est, Band band,
                const std::string& cell_name) {
  const Table1Entry* e = find(cell, est);
  if (!e) return;
  double mise = headline_mise(*e);
  char measured[64], required[64];
  std::snprintf(measured, sizeof(measured), "%.4f", mise);
  std::snprintf(required, sizeof(required), "[%g,%g]", band.lo, band.hi);
  out.push_back({cell_name, estimator_name(est) + " mise", measured, required,
                 std::isfinite(mise) && mise >= band.lo && mise <= band.hi});
}

void check_above(std::vector<Verdict>& out, const Table1Cell& cell, Estimator est,
                 double threshold, const std::string& cell_name) {
  const Table1Entry* e = find(cell, est);
  if (!e) return;
  double mise = headline_mise(*e);
  char measured[64], required[64];
  std::snprintf(measured, sizeof(measured), "%.4f", mise);
  std::snprintf(required, sizeof(required), "> %g", threshold);
  out.push_back({cell_name, estimator_name(est) + " mise", measured, required,
                 std::isfinite(mise) && mise > threshold});
}

void check_order(std::vector<Verdict>& out, const Table1Cell& cell,
                 const std::vector<Estimator>& order, const std::string& cell_name) {
  std::string measured;
  bool ok = true;
  double prev = -1.0;
  for (Estimator est : order) {
    const Table1Entry* e = find(cell, est);
    if (!e) return;
    double mise = headline_mise(*e);
    if (!measured.empty()) measured += " < ";
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%s=%.4f", estimator_name(est).c_str(), mise);
    measured += buf;
    if (!std::isfinite(mise) || (prev >= 0.0 && !(prev < mise))) ok = false;
    prev = mise;
  }
  out.push_back({cell_name, "ordering", measured, "strictly increasing", ok});
}

void write_verdicts(const std::vector<Verdict>& verdicts, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  out << "# hazard-sbf-verdicts/v1\n";
  out << "cell\tcheck\tmeasured\trequired\tstatus\n";
  for (const auto& v : verdicts)
    out << v.cell << '\t' << v.check << '\t' << v.measured << '\t' << v.required << '\t'
        << (v.pass ? "pass" : "fail") << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulation table reproduction"};
  std::string scale = "smoke";
  std::string out_dir = "repro_out";
  int threads = 0;
  int grid_points = 101;
  app.add_option("--scale", scale, "smoke, desk or full")
      ->check(CLI::IsMember({"smoke", "desk", "full"}));
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads (0 = auto)");
  app.add_option("--grid-points", grid_points, "grid points per dimension");
  CLI11_PARSE(app, argc, argv);

  std::filesystem::create_directories(out_dir);
  FitConfig base;
  base.bandwidth = {0.1};  // replaced by the search
  auto started = std::chrono::steady_clock::now();
  std::vector<Verdict> verdicts;

  auto run_cell = [&](int d, int n, const std::vector<Estimator>& estimators, int search_reps,
                      int final_reps) {
    SimConfig scen = scenario_for(d, n, threads);
    std::printf("cell d=%d n=%d: search %d reps, final %d reps...\n", d, n, search_reps,
                final_reps);
    std::fflush(stdout);
    Table1Cell cell = run_table1_cell(scen, estimators, search_reps, final_reps, grid_points,
                                      base);
    char name[64];
    std::snprintf(name, sizeof(name), "d=%d,n=%d", d, n);
    write_table1_cell(cell, out_dir + "/table_d" + std::to_string(d) + "_n" +
                                std::to_string(n) + ".tsv");
    for (const auto& e : cell.entries)
      std::printf("  %-6s h=%.3f mise=%.4f (conv %d/%d)\n",
                  estimator_name(e.estimator).c_str(), e.bandwidth, headline_mise(e),
                  e.report.n_converged, e.report.n_reps);
    std::fflush(stdout);

    if (d == 3 && n == 5000) {
      check_band(verdicts, cell, Estimator::LocalLinearSbf, {0.021, 0.046}, name);
      check_band(verdicts, cell, Estimator::LocalConstantSbf, {0.035, 0.075}, name);
      check_order(verdicts, cell,
                  {Estimator::LocalLinearSbf, Estimator::LocalConstantSbf,
                   Estimator::LocalConstantClassic, Estimator::LocalLinearClassic},
                  name);
    } else if (d == 3 && n == 500) {
      check_band(verdicts, cell, Estimator::LocalLinearSbf, {0.15, 0.40}, name);
      check_band(verdicts, cell, Estimator::LocalConstantSbf, {0.18, 0.45}, name);
      check_above(verdicts, cell, Estimator::LocalLinearClassic, 5.0, name);
      check_order(verdicts, cell, {Estimator::LocalLinearSbf, Estimator::LocalLinearClassic},
                  name);
    } else if (d == 10 && n == 5000) {
      check_band(verdicts, cell, Estimator::LocalLinearSbf, {0.013, 0.030}, name);
      check_order(verdicts, cell,
                  {Estimator::LocalLinearSbf, Estimator::LocalConstantSbf}, name);
    }
    return cell;
  };

  if (scale == "smoke") {
    run_cell(3, 500, {Estimator::LocalLinearSbf, Estimator::LocalLinearClassic}, 6, 10);
  } else if (scale == "desk") {
    run_cell(3, 500, kAll, 20, 100);
    run_cell(3, 5000, kAll, 20, 100);
    run_cell(10, 500, kAll, 20, 100);
    run_cell(10, 5000, kAll, 20, 100);
  } else {
    for (int d : {3, 10, 30})
      for (int n : {500, 5000}) run_cell(d, n, kAll, 20, 500);
  }

  write_verdicts(verdicts, out_dir + "/verdicts.tsv");
  int failed = 0;
  for (const auto& v : verdicts) {
    std::printf("[%s] %s %s: %s (required %s)\n", v.pass ? "pass" : "FAIL", v.cell.c_str(),
                v.check.c_str(), v.measured.c_str(), v.required.c_str());
    failed += v.pass ? 0 : 1;
  }
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  std::printf("done in %.1fs, %d/%zu checks failed\n", secs, failed, verdicts.size());
  return failed == 0 ? 0 : 1;
}
