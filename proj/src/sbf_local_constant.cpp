#include "hazsbf/sbf_local_constant.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fit_detail.hpp"

namespace hazsbf {

namespace {

AdditiveFit make_state(const LcMarginals& m, const EvaluationGrid& grid,
                       const FitConfig& config) {
  AdditiveFit fit;
  fit.grid = grid;
  fit.intercept = m.alpha_star;
  fit.estimator = Estimator::LocalConstantSbf;
  fit.norming = config.norming;
  fit.bandwidth.resize(grid.n_dims());
  for (int k = 0; k < grid.n_dims(); ++k) fit.bandwidth[k] = config.bandwidth_for(k);
  fit.components.resize(grid.n_dims());
  fit.supported.resize(grid.n_dims());
  fit.centering_weights.resize(grid.n_dims());
  for (int k = 0; k < grid.n_dims(); ++k) {
    fit.supported[k] = support_mask(m.E[k]);
    fit.components[k].assign(grid.dims[k].n_points, 0.0);
    auto& w = fit.centering_weights[k];
    w.assign(grid.dims[k].n_points, 0.0);
    for (int i = 0; i < grid.dims[k].n_points; ++i)
      if (fit.supported[k][i])
        w[i] = config.norming == Norming::ExposureWeighted ? m.E[k][i] : 1.0;
  }
  return fit;
}

}  // namespace

LcUpdate lc_backfit_update(const AdditiveFit& current, const LcMarginals& marginals, int k,
                           const EvaluationGrid& grid, const FitConfig& config) {
  const int nd = grid.n_dims();
  if (nd > 1 && !marginals.has_pairs)
    throw std::invalid_argument("lc_backfit_update: pair tables required for d >= 1");
  const auto& g = grid.dims[k];
  const auto& E_k = marginals.E[k];
  const auto& O_k = marginals.O[k];
  const auto& mask = current.supported[k];

  LcUpdate out;
  out.raw.assign(g.n_points, 0.0);

  // weighted other-component curves: tw_j * alpha_j, zero off support
  std::vector<std::vector<double>> weighted(nd);
  for (int j = 0; j < nd; ++j) {
    if (j == k) continue;
    weighted[j].resize(grid.dims[j].n_points);
    for (int i = 0; i < grid.dims[j].n_points; ++i)
      weighted[j][i] = grid.dims[j].trap_weight(i) * current.components[j][i];
  }

  for (int i = 0; i < g.n_points; ++i) {
    if (!mask[i]) continue;
    double cross = 0.0;
    for (int j = 0; j < nd; ++j) {
      if (j == k) continue;
      double acc = 0.0;
      for (int mjt = 0; mjt < grid.dims[j].n_points; ++mjt)
        acc += weighted[j][mjt] * marginals.E_jk(k, j, i, mjt, nd);
      cross += acc;
    }
    out.raw[i] = O_k[i] / E_k[i] - cross / E_k[i];
  }

  out.centered = out.raw;
  auto tw = detail::trap_weights(g);
  detail::center_curve(out.centered, tw, E_k, mask, config.norming);
  return out;
}

AdditiveFit lc_fit(const LcMarginals& marginals, const EvaluationGrid& grid,
                   const FitConfig& config) {
  check_fit_config(config, grid);
  AdditiveFit fit = make_state(marginals, grid, config);
  const int nd = grid.n_dims();

  std::vector<std::vector<double>> tw(nd);
  for (int k = 0; k < nd; ++k) tw[k] = detail::trap_weights(grid.dims[k]);

  // initialize with the centered pilot ratios
  PilotCurves pilot = lc_pilot_estimates(marginals);
  for (int k = 0; k < nd; ++k) {
    fit.components[k] = pilot.values[k];
    detail::center_curve(fit.components[k], tw[k], marginals.E[k], fit.supported[k],
                         config.norming);
  }

  std::vector<std::vector<double>> prev = fit.components;
  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    prev = fit.components;
    for (int k = 0; k < nd; ++k)
      fit.components[k] = lc_backfit_update(fit, marginals, k, grid, config).centered;
    auto crit = detail::sweep_criterion(tw, prev, fit.components, fit.supported,
                                        config.tol_offset);
    fit.iterations_used = iter;
    fit.final_criterion = crit.finite ? crit.value() : std::numeric_limits<double>::quiet_NaN();
    if (!crit.finite || crit.value() > detail::kDivergenceRatio) {
      fit.components = prev;  // keep the last finite state
      fit.diverged = true;
      fit.converged = false;
      return fit;
    }
    if (crit.value() < config.tolerance) {
      fit.converged = true;
      return fit;
    }
  }
  fit.converged = false;
  return fit;
}

AdditiveFit lc_fit(const Dataset& data, const EvaluationGrid& grid, const FitConfig& config) {
  LcMarginals m = build_lc_marginals(data, grid, config, grid.n_dims() > 1);
  return lc_fit(m, grid, config);
}

}  // namespace hazsbf
