#pragma once

#include <string>
#include <vector>

#include "hazsbf/evaluation.hpp"

namespace hazsbf {

// One estimator's row in a simulation-table cell: its searched bandwidth and
// the resulting study report.
struct Table1Entry {
  Estimator estimator = Estimator::LocalConstantSbf;
  double bandwidth = 0.0;
  EvalReport report;
};

struct Table1Cell {
  SimConfig scenario;
  double horizon = 0.0;
  std::vector<Table1Entry> entries;
};

// Candidate bandwidth grids per estimator flavor, scaled by the usual
// n^{-1/5} rate from the n = 5000 anchors and clamped to the half-width
// limit of the narrowest dimension.
std::vector<double> table1_candidates(Estimator estimator, int n, double horizon);

// Bandwidth search followed by the final study for every estimator.
// Replication seeds depend only on the scenario seed, so all estimators and
// candidates see common random numbers.
Table1Cell run_table1_cell(const SimConfig& scenario, const std::vector<Estimator>& estimators,
                           int search_reps, int final_reps, int grid_points,
                           const FitConfig& base_config);

void write_table1_cell(const Table1Cell& cell, const std::string& path);

double headline_mise(const Table1Entry& entry);  // component-1 MISE

}  // namespace hazsbf
