#include "hazsbf/sbf_local_linear.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fit_detail.hpp"

namespace hazsbf {

namespace {

AdditiveFit make_state(const LlMarginals& m, const EvaluationGrid& grid,
                       const FitConfig& config) {
  AdditiveFit fit;
  fit.grid = grid;
  fit.intercept = m.alpha_star;
  fit.estimator = Estimator::LocalLinearSbf;
  fit.norming = config.norming;
  fit.bandwidth.resize(grid.n_dims());
  for (int k = 0; k < grid.n_dims(); ++k) fit.bandwidth[k] = config.bandwidth_for(k);
  fit.components.resize(grid.n_dims());
  fit.derivatives.resize(grid.n_dims());
  fit.supported.resize(grid.n_dims());
  fit.centering_weights.resize(grid.n_dims());
  for (int k = 0; k < grid.n_dims(); ++k) {
    fit.supported[k] = support_mask(m.V00[k]);
    fit.components[k].assign(grid.dims[k].n_points, 0.0);
    fit.derivatives[k].assign(grid.dims[k].n_points, 0.0);
    auto& w = fit.centering_weights[k];
    w.assign(grid.dims[k].n_points, 0.0);
    for (int i = 0; i < grid.dims[k].n_points; ++i)
      if (fit.supported[k][i])
        w[i] = config.norming == Norming::ExposureWeighted ? m.V00[k][i] : 1.0;
  }
  return fit;
}

// cross terms of dimension j against every other dimension's value and
// derivative curves; `factor_on_target` switches between the plain tables
// (value equation) and the ones carrying the design factor of dimension j
// (slope equation).
std::vector<double> cross_terms(const AdditiveFit& state, const LlMarginals& m, int j,
                                const EvaluationGrid& grid, bool factor_on_target) {
  const int nd = grid.n_dims();
  std::vector<double> cross(grid.dims[j].n_points, 0.0);
  for (int l = 0; l < nd; ++l) {
    if (l == j) continue;
    const auto& gl = grid.dims[l];
    std::vector<double> wv(gl.n_points), wd(gl.n_points);
    for (int i = 0; i < gl.n_points; ++i) {
      double tw = gl.trap_weight(i);
      wv[i] = tw * state.components[l][i];
      wd[i] = tw * state.derivatives[l][i];
    }
    for (int i = 0; i < grid.dims[j].n_points; ++i) {
      double acc = 0.0;
      if (!factor_on_target) {
        for (int ml = 0; ml < gl.n_points; ++ml)
          acc += wv[ml] * m.pair00(l, j, ml, i, nd) + wd[ml] * m.pair_f_first(l, j, ml, i, nd);
      } else {
        for (int ml = 0; ml < gl.n_points; ++ml)
          acc += wv[ml] * m.pair_f_second(l, j, ml, i, nd) + wd[ml] * m.pair_ff(l, j, ml, i, nd);
      }
      cross[i] += acc;
    }
  }
  return cross;
}

std::vector<std::uint8_t> slope_mask(const LlMarginals& m, int j,
                                     const std::vector<std::uint8_t>& value_mask) {
  auto mask = support_mask(m.Vff[j]);
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = mask[i] && value_mask[i];
  return mask;
}

}  // namespace

LlUpdate ll_backfit_update(const AdditiveFit& current, const LlMarginals& marginals, int j,
                           const EvaluationGrid& grid, const FitConfig& config) {
  const int nd = grid.n_dims();
  if (nd > 1 && !marginals.has_pairs)
    throw std::invalid_argument("ll_backfit_update: pair tables required for d >= 1");
  const auto& g = grid.dims[j];
  const auto& mask = current.supported[j];
  const double alpha_star = marginals.alpha_star;

  LlUpdate out;
  out.value.assign(g.n_points, 0.0);
  out.derivative.assign(g.n_points, 0.0);

  // value equation, using the previous sweep's own derivative curve
  std::vector<double> crossV = cross_terms(current, marginals, j, grid, false);
  for (int i = 0; i < g.n_points; ++i) {
    if (!mask[i]) continue;
    double v00 = marginals.V00[j][i];
    out.value[i] = (marginals.U0[j][i] - current.derivatives[j][i] * marginals.Vf[j][i] -
                    alpha_star * v00 - crossV[i]) /
                   v00;
  }
  auto tw = detail::trap_weights(g);
  detail::center_curve(out.value, tw, marginals.V00[j], mask, config.norming);

  // slope equation, using the freshly updated value curve; the cross sums
  // skip dimension j so the stale state can be reused for them
  std::vector<double> crossD = cross_terms(current, marginals, j, grid, true);
  auto dmask = slope_mask(marginals, j, mask);
  for (int i = 0; i < g.n_points; ++i) {
    if (!dmask[i]) continue;
    out.derivative[i] = (marginals.Uf[j][i] - (out.value[i] + alpha_star) * marginals.Vf[j][i] -
                         crossD[i]) /
                        marginals.Vff[j][i];
  }
  return out;
}

AdditiveFit ll_fit(const LlMarginals& marginals, const EvaluationGrid& grid,
                   const FitConfig& config) {
  check_fit_config(config, grid);
  AdditiveFit fit = make_state(marginals, grid, config);
  const int nd = grid.n_dims();

  std::vector<std::vector<double>> tw(nd);
  for (int k = 0; k < nd; ++k) tw[k] = detail::trap_weights(grid.dims[k]);

  std::vector<std::vector<double>> prev;
  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    prev = fit.components;
    auto prev_deriv = fit.derivatives;
    for (int j = 0; j < nd; ++j) {
      LlUpdate upd = ll_backfit_update(fit, marginals, j, grid, config);
      fit.components[j] = std::move(upd.value);
      fit.derivatives[j] = std::move(upd.derivative);
    }
    auto crit = detail::sweep_criterion(tw, prev, fit.components, fit.supported,
                                        config.tol_offset);
    fit.iterations_used = iter;
    fit.final_criterion = crit.finite ? crit.value() : std::numeric_limits<double>::quiet_NaN();
    bool deriv_finite = true;
    for (const auto& curve : fit.derivatives)
      for (double v : curve)
        if (!std::isfinite(v)) deriv_finite = false;
    if (!crit.finite || !deriv_finite || crit.value() > detail::kDivergenceRatio) {
      fit.components = prev;
      fit.derivatives = prev_deriv;
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

AdditiveFit ll_fit(const Dataset& data, const EvaluationGrid& grid, const FitConfig& config) {
  LlMarginals m = build_ll_marginals(data, grid, config, grid.n_dims() > 1);
  return ll_fit(m, grid, config);
}

LlResiduals ll_first_order_residuals(const AdditiveFit& fit, const LlMarginals& marginals,
                                     const EvaluationGrid& grid) {
  // The stabilized iteration pins the intercept at alpha_star and recenters
  // each value curve, so its fixed point satisfies the slope equation exactly
  // and the value equation up to a per-dimension multiple of V00. That
  // multiple is the (asymptotically vanishing) intercept correction; the
  // reported residuals have it projected out.
  const int nd = grid.n_dims();
  LlResiduals out;
  out.value_eq.resize(nd);
  out.slope_eq.resize(nd);
  const double alpha_star = fit.intercept;
  for (int j = 0; j < nd; ++j) {
    const auto& g = grid.dims[j];
    const auto& mask = fit.supported[j];
    auto dmask = slope_mask(marginals, j, mask);
    std::vector<double> crossV = cross_terms(fit, marginals, j, grid, false);
    std::vector<double> crossD = cross_terms(fit, marginals, j, grid, true);

    std::vector<double> res1(g.n_points, 0.0), scale1(g.n_points, 1.0);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < g.n_points; ++i) {
      if (!mask[i]) continue;
      double v00 = marginals.V00[j][i];
      double t_val = (fit.components[j][i] + alpha_star) * v00;
      double t_slope = fit.derivatives[j][i] * marginals.Vf[j][i];
      res1[i] = t_val + t_slope - marginals.U0[j][i] + crossV[i];
      scale1[i] = std::abs(t_val) + std::abs(t_slope) + std::abs(marginals.U0[j][i]) +
                  std::abs(crossV[i]) + 1e-12;
      double tw = g.trap_weight(i);
      num += tw * res1[i] * v00;
      den += tw * v00 * v00;
    }
    double c = den > 0.0 ? num / den : 0.0;
    out.value_eq[j].assign(g.n_points, 0.0);
    for (int i = 0; i < g.n_points; ++i)
      if (mask[i])
        out.value_eq[j][i] = (res1[i] - c * marginals.V00[j][i]) / scale1[i];

    out.slope_eq[j].assign(g.n_points, 0.0);
    for (int i = 0; i < g.n_points; ++i) {
      if (!dmask[i]) continue;
      double t_val = (fit.components[j][i] + alpha_star) * marginals.Vf[j][i];
      double t_slope = fit.derivatives[j][i] * marginals.Vff[j][i];
      double res2 = t_val + t_slope - marginals.Uf[j][i] + crossD[i];
      double scale2 = std::abs(t_val) + std::abs(t_slope) + std::abs(marginals.Uf[j][i]) +
                      std::abs(crossD[i]) + 1e-12;
      out.slope_eq[j][i] = res2 / scale2;
    }
  }
  return out;
}

}  // namespace hazsbf
