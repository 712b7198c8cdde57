#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hazsbf/evaluation.hpp"

using namespace hazsbf;

namespace {

FitConfig base_config() {
  FitConfig cfg;
  cfg.bandwidth = {0.3};
  cfg.threads = 1;
  return cfg;
}

AdditiveFit blank_fit(const EvaluationGrid& grid) {
  AdditiveFit fit;
  fit.grid = grid;
  const int nd = grid.n_dims();
  fit.components.resize(nd);
  fit.centering_weights.resize(nd);
  fit.supported.resize(nd);
  for (int k = 0; k < nd; ++k) {
    fit.components[k].assign(grid.dims[k].n_points, 0.0);
    fit.centering_weights[k].assign(grid.dims[k].n_points, 1.0);
    fit.supported[k].assign(grid.dims[k].n_points, 1);
  }
  fit.converged = true;
  return fit;
}

}  // namespace

TEST_CASE("component mise of five hand subjects") {
  EvaluationGrid grid{{{0.0, 1.0, 5}, {-1.0, 1.0, 5}}};
  auto fit = blank_fit(grid);
  fit.components[1] = {0.1, -0.2, 0.0, 0.25, -0.15};

  TrueHazard truth{1, 0.0, 1.0, 1.0};  // component: sin(pi z)
  Dataset data;
  data.dim = 1;
  const double zs[] = {-0.6, -0.1, 0.2, 0.5, 0.9};
  for (double z : zs)
    data.records.push_back(SurvivalRecord{0.0, 0.5, true, {CovariateChannel::constant(z)}});

  // hand computation with the same gauge: truth centered by its uniform
  // trapezoid mean over the grid (zero for the odd sine on a symmetric grid)
  double expected = 0.0;
  for (int i = 0; i < 5; ++i) {
    double z = zs[i];
    double pos = (z + 1.0) / 0.5;
    int cell = static_cast<int>(pos);
    double frac = pos - cell;
    double fitted = fit.components[1][cell] * (1 - frac) + fit.components[1][cell + 1] * frac;
    double diff = fitted - std::sin(3.14159265358979323846 * z);
    expected += diff * diff;
  }
  expected /= 5.0;
  CHECK(std::abs(component_mise(fit, truth, data, 1) - expected) < 1e-12);
}

TEST_CASE("zero fit scores the centered truth's second moment") {
  EvaluationGrid grid{{{0.0, 1.0, 9}, {-1.25, 1.25, 9}}};
  auto fit = blank_fit(grid);
  TrueHazard truth{1, 0.0, 4.0, 1.0};
  Dataset data;
  data.dim = 1;
  const double zs[] = {-0.9, -0.3, 0.1, 0.4, 0.75};
  double m = 0.0;
  for (double z : zs) {
    data.records.push_back(SurvivalRecord{0.0, 1.0, true, {CovariateChannel::constant(z)}});
    double v = truth.component(1, z);
    m += v * v;
  }
  m /= 5.0;
  CHECK(component_mise(fit, truth, data, 1) == doctest::Approx(m).epsilon(1e-12));
}

TEST_CASE("fit equal to centered truth at nodes scores near zero") {
  EvaluationGrid grid{{{0.0, 1.0, 101}, {-1.25, 1.25, 101}}};
  auto fit = blank_fit(grid);
  TrueHazard truth{1, 0.0, 4.0, 1.0};
  for (int i = 0; i < 101; ++i)
    fit.components[1][i] = truth.component(1, grid.dims[1].point(i));

  Dataset data;
  data.dim = 1;
  Rng rng(404u);
  for (int i = 0; i < 200; ++i)
    data.records.push_back(SurvivalRecord{
        0.0, 1.0, true, {CovariateChannel::constant(-1.2 + 2.4 * rng.uniform())}});
  CHECK(component_mise(fit, truth, data, 1) < 1e-3);
}

TEST_CASE("single-replication study has zero variance") {
  SimConfig scen;
  scen.n = 250;
  scen.d = 2;
  scen.rho = 0.3;
  scen.seed = 31u;
  scen.horizon = calibrate_horizon(scen);
  auto grid = simulation_grid(scen.d, scen.horizon, 21);
  auto reports = mc_study(scen, {Estimator::LocalConstantSbf}, 0.35, 1, grid, base_config());
  REQUIRE(reports.size() == 1);
  REQUIRE(!reports[0].is_na());
  for (const auto& m : reports[0].per_component) {
    CHECK(m.variance == 0.0);
    CHECK(m.mise_ref == doctest::Approx(m.bias_sq).epsilon(1e-12));
  }
}

TEST_CASE("decomposition is exact and the study is deterministic") {
  SimConfig scen;
  scen.n = 200;
  scen.d = 2;
  scen.rho = 0.5;
  scen.seed = 77u;
  scen.horizon = calibrate_horizon(scen);
  scen.threads = 2;
  auto grid = simulation_grid(scen.d, scen.horizon, 17);
  auto est = std::vector<Estimator>{Estimator::LocalConstantSbf, Estimator::LocalLinearSbf};
  auto a = mc_study(scen, est, 0.4, 5, grid, base_config());
  auto b = mc_study(scen, est, 0.4, 5, grid, base_config());
  for (std::size_t e = 0; e < a.size(); ++e) {
    CHECK(a[e].n_converged == b[e].n_converged);
    CHECK(a[e].n_converged > 0);
    for (int k = 0; k < grid.n_dims(); ++k) {
      const auto& ma = a[e].per_component[k];
      const auto& mb = b[e].per_component[k];
      CHECK(ma.mise == mb.mise);  // bitwise determinism
      CHECK(ma.bias_sq == mb.bias_sq);
      CHECK(ma.variance == mb.variance);
      CHECK(std::abs(ma.mise_ref - (ma.bias_sq + ma.variance)) <= 1e-8 * ma.mise_ref + 1e-12);
      CHECK(ma.mise >= 0.0);
      CHECK(ma.variance >= 0.0);
    }
  }
}

TEST_CASE("bandwidth search profiles every candidate and is reproducible") {
  SimConfig scen;
  scen.n = 150;
  scen.d = 1;
  scen.rho = 0.0;
  scen.seed = 99u;
  scen.horizon = calibrate_horizon(scen);
  auto grid = simulation_grid(scen.d, scen.horizon, 17);
  std::vector<double> candidates{0.2 * scen.horizon, 0.3 * scen.horizon, 0.42 * scen.horizon};
  auto a = bandwidth_search(scen, Estimator::LocalConstantSbf, candidates, 4, grid,
                            base_config());
  auto b = bandwidth_search(scen, Estimator::LocalConstantSbf, candidates, 4, grid,
                            base_config());
  CHECK(a.score.size() == candidates.size());
  CHECK(a.reports.size() == candidates.size());
  CHECK(a.best == b.best);
  for (std::size_t i = 0; i < candidates.size(); ++i) CHECK(a.score[i] == b.score[i]);
  // selection is the argmin of the profile
  std::size_t arg = 0;
  for (std::size_t i = 1; i < a.score.size(); ++i)
    if (a.score[i] < a.score[arg]) arg = i;
  CHECK(a.best == candidates[arg]);
}
