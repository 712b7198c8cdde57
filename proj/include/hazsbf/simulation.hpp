#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hazsbf/types.hpp"
#include "hazsbf/util.hpp"

namespace hazsbf {

struct SimConfig {
  int n = 500;
  int d = 3;
  double rho = 0.5;
  double gompertz_rate = 0.01;       // exponent of the time baseline
  double amplitude = 4.0;            // numerator of amplitude / sqrt(d)
  double censor_scale_divisor = 1.75;
  double horizon = 0.0;              // <= 0: calibrated from a pilot run
  std::uint64_t seed = 1;
  int threads = 0;
};

void check_sim_config(const SimConfig& config);

// True data-generating hazard: baseline_scale * e^{rate t} plus alternating
// sine covariate components.
struct TrueHazard {
  int d = 0;
  double gompertz_rate = 0.01;
  double amplitude = 4.0;
  double baseline_scale = 1.0;

  double baseline(double t) const;
  double component(int k, double z) const;  // k in 1..d
  double covariate_sum(std::span<const double> z) const;
  double value(double t, std::span<const double> z) const;
  double cumulative(double t, std::span<const double> z) const;
};

// Latent equicorrelated Gaussians (before the arctan map and rejection).
std::vector<double> draw_latent_covariates(const SimConfig& config, Rng& rng);

// Covariates in (-1.25, 1.25)^d, redrawn until the covariate part of the
// hazard is positive (skipped when the amplitude is zero and the condition
// is vacuous). Throws after 1e5 rejected draws.
std::vector<double> draw_covariates(const SimConfig& config, Rng& rng);

// Solves Lambda(t | z) = target by bracketing, bisection and Newton polish.
double invert_cumulative(const TrueHazard& truth, std::span<const double> z, double target);

double sample_survival_time(const TrueHazard& truth, std::span<const double> z, Rng& rng);

// 99th percentile of the observed (censored) exit time under the scenario,
// from a fixed-size deterministic pilot sample.
double calibrate_horizon(const SimConfig& config);

struct SimulatedData {
  Dataset data;
  TrueHazard truth;
  double horizon = 0.0;
  double censored_fraction = 0.0;
};

SimulatedData simulate_dataset(const SimConfig& config);

inline constexpr double kCovariateHalfWidth = 1.25;

// Time axis [0, horizon], covariate axes (-1.25, 1.25), equal point counts.
EvaluationGrid simulation_grid(int d, double horizon, int points_per_dim);

}  // namespace hazsbf
