#include "hazsbf/types.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hazsbf {

double interpolate(const DimensionGrid& g, const std::vector<double>& values, double x) {
  if (static_cast<int>(values.size()) != g.n_points)
    throw std::invalid_argument("interpolate: curve length does not match grid");
  if (x < g.lo || x > g.hi)
    throw std::out_of_range("interpolate: point outside grid domain");
  double pos = (x - g.lo) / g.step();
  int i = static_cast<int>(pos);
  if (i >= g.n_points - 1) return values.back();
  double frac = pos - i;
  return values[i] * (1.0 - frac) + values[i + 1] * frac;
}

void check_grid(const EvaluationGrid& grid) {
  if (grid.dims.empty()) throw std::invalid_argument("grid: needs at least the time dimension");
  for (std::size_t k = 0; k < grid.dims.size(); ++k) {
    const auto& d = grid.dims[k];
    if (!(d.lo < d.hi))
      throw std::invalid_argument("grid: dimension " + std::to_string(k) + " has lo >= hi");
    if (d.n_points < 3)
      throw std::invalid_argument("grid: dimension " + std::to_string(k) + " needs >= 3 points");
  }
  if (grid.dims[0].lo != 0.0)
    throw std::invalid_argument("grid: time dimension must start at 0");
}

void check_fit_config(const FitConfig& config, const EvaluationGrid& grid) {
  check_grid(grid);
  if (config.bandwidth.empty())
    throw std::invalid_argument("config: bandwidth missing");
  if (config.bandwidth.size() != 1 &&
      config.bandwidth.size() != grid.dims.size())
    throw std::invalid_argument("config: bandwidth count must be 1 or match dimensions");
  for (int k = 0; k < grid.n_dims(); ++k) {
    double h = config.bandwidth_for(k);
    if (!(h > 0.0))
      throw std::invalid_argument("config: bandwidth must be positive");
    if (!(h < 0.5 * (grid.dims[k].hi - grid.dims[k].lo)))
      throw std::invalid_argument("config: bandwidth must be below half the domain width of dimension " +
                                  std::to_string(k));
  }
  if (!(config.tolerance > 0.0)) throw std::invalid_argument("config: tolerance must be positive");
  if (config.max_iterations < 1) throw std::invalid_argument("config: max_iterations must be >= 1");
  if (config.quadrature_order < 2) throw std::invalid_argument("config: quadrature_order must be >= 2");
}

ValidatedDataset validate_dataset(const Dataset& dataset, const EvaluationGrid& grid) {
  check_grid(grid);
  if (dataset.records.empty()) throw std::invalid_argument("dataset: empty");
  const double horizon = grid.horizon();
  const int d = grid.covariate_dim();
  if (dataset.dim != d)
    throw std::invalid_argument("dataset: covariate dimension " + std::to_string(dataset.dim) +
                                " does not match grid dimension " + std::to_string(d));

  ValidatedDataset out;
  out.data.dim = d;
  out.data.records.reserve(dataset.records.size());
  for (std::size_t i = 0; i < dataset.records.size(); ++i) {
    SurvivalRecord r = dataset.records[i];
    if (!std::isfinite(r.entry_time) || !std::isfinite(r.exit_time))
      throw std::invalid_argument("dataset: non-finite times in record " + std::to_string(i));
    if (!(r.entry_time < r.exit_time))
      throw std::invalid_argument("dataset: record " + std::to_string(i) +
                                  " has zero-length exposure (entry >= exit)");
    if (static_cast<int>(r.covariates.size()) != d)
      throw std::invalid_argument("dataset: record " + std::to_string(i) +
                                  " has wrong covariate count");
    for (int j = 0; j < d; ++j) {
      const auto& ch = r.covariates[j];
      const auto& dom = grid.dims[j + 1];
      if (ch.kind == CovariateChannel::Kind::Constant &&
          (ch.param < dom.lo || ch.param > dom.hi))
        throw std::invalid_argument("dataset: record " + std::to_string(i) + " covariate " +
                                    std::to_string(j + 1) + " outside grid domain");
    }

    bool clipped = false;
    if (r.entry_time < 0.0) { r.entry_time = 0.0; clipped = true; }
    if (r.entry_time >= horizon) { ++out.summary.n_dropped; continue; }
    if (r.exit_time > horizon) {
      r.exit_time = horizon;
      r.event = false;  // an event beyond the window is unobserved
      clipped = true;
    }
    if (!(r.entry_time < r.exit_time)) { ++out.summary.n_dropped; continue; }
    if (clipped) ++out.summary.n_clipped;
    out.data.records.push_back(std::move(r));
  }
  if (out.data.records.empty())
    throw std::invalid_argument("dataset: no records remain inside the study window");
  return out;
}

double evaluate_fit(const AdditiveFit& fit, const std::vector<double>& x) {
  if (x.size() != fit.components.size())
    throw std::invalid_argument("evaluate_fit: point dimension mismatch");
  double value = fit.intercept;
  for (std::size_t k = 0; k < x.size(); ++k)
    value += interpolate(fit.grid.dims[k], fit.components[k], x[k]);
  return value;
}

std::string estimator_name(Estimator e) {
  switch (e) {
    case Estimator::LocalConstantSbf: return "lc-sbf";
    case Estimator::LocalLinearSbf: return "ll-sbf";
    case Estimator::LocalConstantClassic: return "lc-bf";
    case Estimator::LocalLinearClassic: return "ll-bf";
  }
  return "unknown";
}

}  // namespace hazsbf
