#pragma once

#include <string>
#include <vector>

#include "hazsbf/simulation.hpp"
#include "hazsbf/types.hpp"

namespace hazsbf {

struct ComponentMetrics {
  double mise = 0.0;      // paper-style: averaged over the replication's own sample
  double mise_ref = 0.0;  // on the fixed reference sample; equals bias_sq + variance
  double bias_sq = 0.0;
  double variance = 0.0;
};

struct EvalReport {
  Estimator estimator = Estimator::LocalConstantSbf;
  std::vector<ComponentMetrics> per_component;  // d+1 entries, index 0 = time
  int n_reps = 0;
  int n_converged = 0;
  double bandwidth = 0.0;
  std::string scenario_digest;

  bool is_na() const { return n_converged == 0; }
};

// Mean squared distance between the fitted component k and the true one,
// evaluated at the dataset's own covariate values (exit times for k = 0).
// The true component is centered to the fit's norming gauge first.
double component_mise(const AdditiveFit& fit, const TrueHazard& truth, const Dataset& data,
                      int k);

// Monte Carlo study: n_reps fresh datasets, every estimator fitted on each,
// per-component MISE averaged over converged replications. Bias/variance are
// decomposed on a fixed per-scenario reference sample. Replications whose fit
// fails to converge (or diverges) are counted and excluded; an all-diverged
// estimator yields an NA report.
std::vector<EvalReport> mc_study(const SimConfig& scenario,
                                 const std::vector<Estimator>& estimators, double bandwidth,
                                 int n_reps, const EvaluationGrid& grid,
                                 const FitConfig& base_config);

struct BandwidthSearchResult {
  double best = 0.0;
  std::vector<double> candidates;
  std::vector<double> score;               // summed covariate-component MISE
  std::vector<std::vector<EvalReport>> reports;  // per candidate
};

// Grid search with common random numbers: every candidate sees the same
// replication seeds. Scores an estimator by the sum of its covariate
// components' MISE (the time component is used only when d = 0).
BandwidthSearchResult bandwidth_search(const SimConfig& scenario, Estimator estimator,
                                       const std::vector<double>& candidates, int n_reps,
                                       const EvaluationGrid& grid,
                                       const FitConfig& base_config);

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

inline constexpr int kReferenceSampleSize = 500;

std::string scenario_digest(const SimConfig& scenario, double horizon);

}  // namespace hazsbf
