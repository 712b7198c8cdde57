#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hazsbf/projection_oracle.hpp"
#include "hazsbf/types.hpp"
#include "hazsbf/util.hpp"

using namespace hazsbf;

namespace {

EvaluationGrid unit_grid(int d, int points = 11) {
  EvaluationGrid g;
  for (int k = 0; k <= d; ++k) g.dims.push_back({0.0, 1.0, points});
  return g;
}

SurvivalRecord record(double entry, double exit, bool event, std::vector<double> zs) {
  SurvivalRecord r;
  r.entry_time = entry;
  r.exit_time = exit;
  r.event = event;
  for (double z : zs) r.covariates.push_back(CovariateChannel::constant(z));
  return r;
}

}  // namespace

TEST_CASE("validation accepts, clips and rejects as contracted") {
  auto grid = unit_grid(1);

  SUBCASE("in-range record passes untouched") {
    Dataset data{{record(0.0, 1.0, true, {0.5})}, 1};
    auto v = validate_dataset(data, grid);
    CHECK(v.summary.n_clipped == 0);
    CHECK(v.summary.n_dropped == 0);
    CHECK(v.data.records[0].exit_time == 1.0);
    CHECK(v.data.records[0].event);
  }

  SUBCASE("an event beyond the window becomes a censoring at the horizon") {
    Dataset data{{record(0.0, 1.2, true, {0.5})}, 1};
    auto v = validate_dataset(data, grid);
    CHECK(v.summary.n_clipped == 1);
    CHECK(v.data.records[0].exit_time == 1.0);
    CHECK_FALSE(v.data.records[0].event);
  }

  SUBCASE("zero-length exposure is an error") {
    Dataset data{{record(0.5, 0.5, true, {0.5})}, 1};
    CHECK_THROWS_AS(validate_dataset(data, grid), std::invalid_argument);
  }

  SUBCASE("dimension mismatch and out-of-domain covariates are errors") {
    Dataset wrong_dim{{record(0.0, 1.0, true, {0.5, 0.5})}, 2};
    CHECK_THROWS_AS(validate_dataset(wrong_dim, grid), std::invalid_argument);
    Dataset out_of_domain{{record(0.0, 1.0, true, {1.5})}, 1};
    CHECK_THROWS_AS(validate_dataset(out_of_domain, grid), std::invalid_argument);
  }

  SUBCASE("empty dataset is an error") {
    Dataset data;
    data.dim = 1;
    CHECK_THROWS_AS(validate_dataset(data, grid), std::invalid_argument);
  }

  SUBCASE("records entirely outside the window are dropped and counted") {
    Dataset data{{record(0.0, 0.4, true, {0.2}), record(1.0, 1.5, false, {0.2})}, 1};
    auto v = validate_dataset(data, grid);
    CHECK(v.summary.n_dropped == 1);
    CHECK(v.data.n() == 1);
  }

  SUBCASE("validation is idempotent") {
    Dataset data{{record(-0.1, 1.4, true, {0.3}), record(0.2, 0.9, false, {0.8})}, 1};
    auto once = validate_dataset(data, grid);
    auto twice = validate_dataset(once.data, grid);
    CHECK(twice.summary.n_clipped == 0);
    CHECK(twice.summary.n_dropped == 0);
    REQUIRE(twice.data.n() == once.data.n());
    for (int i = 0; i < once.data.n(); ++i) {
      CHECK(twice.data.records[i].entry_time == once.data.records[i].entry_time);
      CHECK(twice.data.records[i].exit_time == once.data.records[i].exit_time);
      CHECK(twice.data.records[i].event == once.data.records[i].event);
    }
  }
}

TEST_CASE("evaluate_fit: additive identity, interpolation, node exactness") {
  auto grid = unit_grid(1, 5);
  AdditiveFit fit;
  fit.grid = grid;
  fit.intercept = 0.7;
  fit.components = {std::vector<double>(5, 0.0), std::vector<double>(5, 0.0)};

  SUBCASE("zero components return the intercept everywhere") {
    CHECK(evaluate_fit(fit, {0.3, 0.9}) == 0.7);
    CHECK(evaluate_fit(fit, {0.0, 0.0}) == 0.7);
  }

  SUBCASE("midpoint query averages the bracketing nodes") {
    fit.components[1] = {0.0, 0.4, 0.8, 0.2, 0.0};
    double mid = 0.125;  // halfway between nodes 0 and 1
    CHECK(evaluate_fit(fit, {0.5, mid}) ==
          doctest::Approx(0.7 + 0.5 * (0.0 + 0.4)).epsilon(1e-15));
  }

  SUBCASE("outside the domain is an error") {
    CHECK_THROWS_AS(evaluate_fit(fit, {0.5, 1.01}), std::out_of_range);
    CHECK_THROWS_AS(evaluate_fit(fit, {-0.01, 0.5}), std::out_of_range);
  }
}

TEST_CASE("evaluate_fit at grid nodes equals direct node lookup for an oracle fit") {
  // 3-node grids, synthetic pilot, oracle solve; node queries must be exact
  EvaluationGrid grid;
  grid.dims = {{0.0, 1.0, 3}, {0.0, 1.0, 3}};
  FullGridPilot pilot;
  pilot.grid = grid;
  pilot.n_cells = 9;
  pilot.E_full.assign(9, 1.0);
  pilot.alpha_full = {0.1, 0.4, 0.3, 0.2, 0.5, 0.4, 0.6, 0.9, 0.8};
  pilot.O_full = pilot.alpha_full;
  auto fit = oracle_solve(pilot, grid, Norming::ExposureWeighted);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      std::vector<double> x{grid.dims[0].point(i), grid.dims[1].point(j)};
      double direct = fit.intercept + fit.components[0][i] + fit.components[1][j];
      CHECK(evaluate_fit(fit, x) == doctest::Approx(direct).epsilon(1e-15));
    }
}

TEST_CASE("config invariants are enforced") {
  auto grid = unit_grid(1);
  FitConfig cfg;
  cfg.bandwidth = {0.6};  // >= half the domain width
  CHECK_THROWS_AS(check_fit_config(cfg, grid), std::invalid_argument);
  cfg.bandwidth = {0.2};
  CHECK_NOTHROW(check_fit_config(cfg, grid));
  cfg.tolerance = 0.0;
  CHECK_THROWS_AS(check_fit_config(cfg, grid), std::invalid_argument);
}
