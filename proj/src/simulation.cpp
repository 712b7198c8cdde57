#include "hazsbf/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hazsbf {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kMaxRejections = 100000;
constexpr int kPilotSize = 20000;
constexpr std::uint64_t kPilotStreamBase = 1'000'000'000ULL;

}  // namespace

void check_sim_config(const SimConfig& config) {
  if (config.n < 1) throw std::invalid_argument("sim config: n must be >= 1");
  if (config.d < 1) throw std::invalid_argument("sim config: d must be >= 1");
  if (!(std::abs(config.rho) < 1.0))
    throw std::invalid_argument("sim config: rho must lie in (-1, 1)");
  if (config.d > 1 && config.rho < -1.0 / (config.d - 1))
    throw std::invalid_argument("sim config: rho below -1/(d-1), not a correlation matrix");
  if (!(config.censor_scale_divisor > 0.0))
    throw std::invalid_argument("sim config: censor_scale_divisor must be positive");
}

double TrueHazard::baseline(double t) const {
  return baseline_scale * std::exp(gompertz_rate * t);
}

double TrueHazard::component(int k, double z) const {
  double sign = k % 2 == 1 ? 1.0 : -1.0;
  return sign * amplitude / std::sqrt(static_cast<double>(d)) * std::sin(kPi * z);
}

double TrueHazard::covariate_sum(std::span<const double> z) const {
  double s = 0.0;
  for (int k = 1; k <= d; ++k) s += component(k, z[k - 1]);
  return s;
}

double TrueHazard::value(double t, std::span<const double> z) const {
  return baseline(t) + covariate_sum(z);
}

double TrueHazard::cumulative(double t, std::span<const double> z) const {
  double base = gompertz_rate == 0.0 ? t : std::expm1(gompertz_rate * t) / gompertz_rate;
  return covariate_sum(z) * t + baseline_scale * base;
}

std::vector<double> draw_latent_covariates(const SimConfig& config, Rng& rng) {
  const int d = config.d;
  std::vector<double> z(d);
  if (config.rho >= 0.0) {
    double shared = std::sqrt(config.rho) * rng.normal();
    double own = std::sqrt(1.0 - config.rho);
    for (int k = 0; k < d; ++k) z[k] = shared + own * rng.normal();
  } else {
    // exact square root of the equicorrelation matrix via its two eigenspaces
    for (int k = 0; k < d; ++k) z[k] = rng.normal();
    double mean = 0.0;
    for (double g : z) mean += g;
    mean /= d;
    double along = std::sqrt(1.0 + (d - 1) * config.rho);
    double ortho = std::sqrt(1.0 - config.rho);
    for (int k = 0; k < d; ++k) z[k] = along * mean + ortho * (z[k] - mean);
  }
  return z;
}

std::vector<double> draw_covariates(const SimConfig& config, Rng& rng) {
  TrueHazard truth{config.d, config.gompertz_rate, config.amplitude, 1.0};
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    std::vector<double> z = draw_latent_covariates(config, rng);
    for (double& v : z) v = 2.5 / kPi * std::atan(v);
    if (config.amplitude == 0.0 || truth.covariate_sum(z) > 0.0) return z;
  }
  throw std::runtime_error("draw_covariates: rejection cap reached, hazard never positive");
}

double invert_cumulative(const TrueHazard& truth, std::span<const double> z, double target) {
  if (!(target >= 0.0)) throw std::invalid_argument("invert_cumulative: target must be >= 0");
  if (target == 0.0) return 0.0;
  double hi = 1.0;
  int guard = 0;
  while (truth.cumulative(hi, z) < target) {
    hi *= 2.0;
    if (++guard > 300) throw std::runtime_error("invert_cumulative: cumulative hazard stalls");
  }
  double lo = 0.0;
  for (int it = 0; it < 80; ++it) {
    double mid = 0.5 * (lo + hi);
    (truth.cumulative(mid, z) < target ? lo : hi) = mid;
  }
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 8; ++it) {
    double f = truth.cumulative(t, z) - target;
    if (std::abs(f) <= 1e-12) break;
    double rate = truth.value(t, z);
    if (!(rate > 0.0)) break;
    t = std::clamp(t - f / rate, lo, hi);
  }
  return t;
}

double sample_survival_time(const TrueHazard& truth, std::span<const double> z, Rng& rng) {
  double target = -std::log(rng.uniform_positive());
  return invert_cumulative(truth, z, target);
}

namespace {

struct RawDraw {
  std::vector<double> z;
  double survival = 0.0;
  double censoring = 0.0;
};

RawDraw draw_subject(const SimConfig& config, const TrueHazard& truth, std::uint64_t stream) {
  Rng rng = Rng::substream(config.seed, stream);
  RawDraw out;
  out.z = draw_covariates(config, rng);
  out.survival = sample_survival_time(truth, out.z, rng);
  out.censoring = sample_survival_time(truth, out.z, rng) / config.censor_scale_divisor;
  return out;
}

}  // namespace

double calibrate_horizon(const SimConfig& config) {
  check_sim_config(config);
  TrueHazard truth{config.d, config.gompertz_rate, config.amplitude, 1.0};
  std::vector<double> exits(kPilotSize);
  parallel_for(kPilotSize, config.threads, [&](std::size_t i) {
    RawDraw draw = draw_subject(config, truth, kPilotStreamBase + i);
    exits[i] = std::min(draw.survival, draw.censoring);
  });
  std::sort(exits.begin(), exits.end());
  std::size_t idx = static_cast<std::size_t>(std::ceil(0.99 * kPilotSize)) - 1;
  return exits[std::min(idx, exits.size() - 1)];
}

SimulatedData simulate_dataset(const SimConfig& config) {
  check_sim_config(config);
  SimulatedData out;
  out.truth = TrueHazard{config.d, config.gompertz_rate, config.amplitude, 1.0};
  out.horizon = config.horizon > 0.0 ? config.horizon : calibrate_horizon(config);

  out.data.dim = config.d;
  out.data.records.resize(config.n);
  std::vector<std::uint8_t> censored(config.n, 0);
  parallel_for(static_cast<std::size_t>(config.n), config.threads, [&](std::size_t i) {
    RawDraw draw = draw_subject(config, out.truth, i);
    SurvivalRecord r;
    r.entry_time = 0.0;
    double exit = std::min(draw.survival, draw.censoring);
    bool event = draw.survival <= draw.censoring;
    if (exit > out.horizon) {
      exit = out.horizon;
      event = false;
    }
    r.exit_time = exit;
    r.event = event;
    r.covariates.reserve(config.d);
    for (double z : draw.z) r.covariates.push_back(CovariateChannel::constant(z));
    censored[i] = event ? 0 : 1;
    out.data.records[i] = std::move(r);
  });
  long n_censored = 0;
  for (auto c : censored) n_censored += c;
  out.censored_fraction = static_cast<double>(n_censored) / config.n;
  return out;
}

EvaluationGrid simulation_grid(int d, double horizon, int points_per_dim) {
  EvaluationGrid grid;
  grid.dims.push_back({0.0, horizon, points_per_dim});
  for (int k = 0; k < d; ++k)
    grid.dims.push_back({-kCovariateHalfWidth, kCovariateHalfWidth, points_per_dim});
  return grid;
}

}  // namespace hazsbf
