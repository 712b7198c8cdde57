#include "hazsbf/classical_backfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fit_detail.hpp"
#include "hazsbf/kernel.hpp"

namespace hazsbf {

namespace {

struct ChannelView {
  bool moves = false;
  double param = 0.0;
};

ChannelView channel_of(const SurvivalRecord& r, int dim) {
  if (dim == 0) return {true, 0.0};
  const auto& c = r.covariates[dim - 1];
  return {c.moves(), c.param};
}

double clamp_to(const DimensionGrid& g, double x) { return std::clamp(x, g.lo, g.hi); }

double interp_clamped(const DimensionGrid& g, const std::vector<double>& curve, double x) {
  return interpolate(g, curve, clamp_to(g, x));
}

// Prefix trapezoid integral of a piecewise-linear curve, evaluated between
// arbitrary clamped positions in O(1).
class CurveIntegral {
 public:
  CurveIntegral(const DimensionGrid& g, const std::vector<double>& curve)
      : g_(&g), curve_(&curve), prefix_(g.n_points, 0.0) {
    for (int i = 1; i < g.n_points; ++i)
      prefix_[i] = prefix_[i - 1] + 0.5 * g.step() * (curve[i - 1] + curve[i]);
  }

  double between(double a, double b) const { return upto(b) - upto(a); }

 private:
  double upto(double x) const {
    x = clamp_to(*g_, x);
    double pos = (x - g_->lo) / g_->step();
    int i = std::min(static_cast<int>(pos), g_->n_points - 2);
    double x_i = g_->point(i);
    double c_x = (*curve_)[i] + ((*curve_)[i + 1] - (*curve_)[i]) * (x - x_i) / g_->step();
    return prefix_[i] + 0.5 * (x - x_i) * ((*curve_)[i] + c_x);
  }

  const DimensionGrid* g_;
  const std::vector<double>* curve_;
  std::vector<double> prefix_;
};

// Per-record kernel exposure integrals of the moving dimensions, cached once
// per fit: cache[k][rec * g + node] = int ((x-X)/h)^p bk(x, X(s)) ds.
struct MovingCache {
  std::vector<std::vector<double>> m0;
  std::vector<std::vector<double>> m1;  // filled for local linear only
};

MovingCache build_moving_cache(const Dataset& data, const EvaluationGrid& grid,
                               const FitConfig& cfg, bool with_linear) {
  const int nd = grid.n_dims();
  MovingCache cache;
  cache.m0.resize(nd);
  if (with_linear) cache.m1.resize(nd);
  for (int k = 0; k < nd; ++k) {
    bool any_moving = k == 0;
    for (const auto& r : data.records)
      if (k > 0 && r.covariates[k - 1].moves()) any_moving = true;
    if (!any_moving) continue;
    const auto& g = grid.dims[k];
    Interval dom{g.lo, g.hi};
    double h = cfg.bandwidth_for(k);
    cache.m0[k].assign(static_cast<std::size_t>(data.n()) * g.n_points, 0.0);
    if (with_linear) cache.m1[k].assign(static_cast<std::size_t>(data.n()) * g.n_points, 0.0);
    for (int rec = 0; rec < data.n(); ++rec) {
      ChannelView v = channel_of(data.records[rec], k);
      if (!v.moves) continue;
      double a = v.param + data.records[rec].entry_time;
      double b = v.param + data.records[rec].exit_time;
      for (int i = 0; i < g.n_points; ++i) {
        double x = g.point(i);
        if (x + h < a || x - h > b) continue;
        std::size_t slot = static_cast<std::size_t>(rec) * g.n_points + i;
        cache.m0[k][slot] = kernel_moment_integral(x, a, b, h, dom, 0, cfg.quadrature_order);
        if (with_linear)
          cache.m1[k][slot] = kernel_moment_integral(x, a, b, h, dom, 1, cfg.quadrature_order);
      }
    }
  }
  return cache;
}

// Pointwise sum of the other components along a record's covariate path,
// split into a time-constant part and the moving-channel curve integrals.
struct CrossAccumulator {
  const Dataset& data;
  const EvaluationGrid& grid;
  const FitConfig& cfg;
  const MovingCache& cache;
  const std::vector<std::vector<double>>& comps;
  std::vector<int> moving_dims;
  std::vector<CurveIntegral> moving_integrals;  // aligned with moving_dims
  std::vector<double> const_sum;                // per record, over constant dims

  CrossAccumulator(const Dataset& d, const EvaluationGrid& g, const FitConfig& c,
                   const MovingCache& mc, const std::vector<std::vector<double>>& components)
      : data(d), grid(g), cfg(c), cache(mc), comps(components) {
    const int nd = g.n_dims();
    for (int k = 0; k < nd; ++k)
      if (!cache.m0[k].empty()) {
        moving_dims.push_back(k);
        moving_integrals.emplace_back(g.dims[k], comps[k]);
      }
    const_sum.assign(data.n(), 0.0);
    for (int rec = 0; rec < data.n(); ++rec)
      for (int j = 1; j < nd; ++j) {
        ChannelView v = channel_of(data.records[rec], j);
        if (!v.moves) const_sum[rec] += interp_clamped(g.dims[j], comps[j], v.param);
      }
  }

  // residual-style sum over j != k of comp_j at the record's position,
  // integrated against the dim-k kernel factor with power 0 (and 1 when
  // lane1 != nullptr); adds into cross0/cross1 at the dim-k nodes.
  void accumulate(int k, std::vector<double>& cross0, std::vector<double>* cross1) const {
    const auto& g = grid.dims[k];
    Interval dom{g.lo, g.hi};
    double h = cfg.bandwidth_for(k);
    const int np = g.n_points;
    for (int rec = 0; rec < data.n(); ++rec) {
      const auto& r = data.records[rec];
      ChannelView v = channel_of(r, k);
      double const_part = const_sum[rec];
      if (!v.moves) const_part -= interp_clamped(g, comps[k], v.param);

      // moving-channel curve integrals independent of the node
      double moving_part = 0.0;
      for (std::size_t mi = 0; mi < moving_dims.size(); ++mi) {
        int j = moving_dims[mi];
        if (j == k) continue;
        ChannelView vj = channel_of(r, j);
        if (!vj.moves) continue;
        moving_part += moving_integrals[mi].between(vj.param + r.entry_time,
                                                    vj.param + r.exit_time);
      }

      if (!v.moves) {
        double kb_lo = v.param - h, kb_hi = v.param + h;
        int first = std::max(0, static_cast<int>(std::ceil((kb_lo - g.lo) / g.step() - 1e-12)));
        int last =
            std::min(np - 1, static_cast<int>(std::floor((kb_hi - g.lo) / g.step() + 1e-12)));
        double total = const_part * r.exposure() + moving_part;
        for (int i = first; i <= last; ++i) {
          double x = g.point(i);
          double kb = boundary_kernel(x, v.param, h, dom);
          if (kb == 0.0) continue;
          cross0[i] += kb * total;
          if (cross1) (*cross1)[i] += kb * total * (x - v.param) / h;
        }
      } else {
        // dim k itself moves: the kernel follows the path, other moving
        // components need joint quadrature
        double a = v.param + r.entry_time, b = v.param + r.exit_time;
        for (int i = 0; i < np; ++i) {
          double x = g.point(i);
          if (x + h < a || x - h > b) continue;
          std::size_t slot = static_cast<std::size_t>(rec) * np + i;
          cross0[i] += const_part * cache.m0[k][slot];
          if (cross1) (*cross1)[i] += const_part * cache.m1[k][slot];
          for (std::size_t mi = 0; mi < moving_dims.size(); ++mi) {
            int j = moving_dims[mi];
            if (j == k) continue;
            ChannelView vj = channel_of(r, j);
            if (!vj.moves) continue;
            auto moments = joint_moving(x, v, vj, r, k, j, cross1 != nullptr);
            cross0[i] += moments.first;
            if (cross1) (*cross1)[i] += moments.second;
          }
        }
      }
    }
    for (int i = 0; i < np; ++i) {
      cross0[i] /= data.n();
      if (cross1) (*cross1)[i] /= data.n();
    }
  }

 private:
  std::pair<double, double> joint_moving(double x, ChannelView vk, ChannelView vj,
                                         const SurvivalRecord& r, int k, int j,
                                         bool with_linear) const {
    const auto& gk = grid.dims[k];
    const auto& gj = grid.dims[j];
    Interval dom{gk.lo, gk.hi};
    double h = cfg.bandwidth_for(k);
    double lo = std::max({r.entry_time, x - h - vk.param, dom.lo - vk.param});
    double hi = std::min({r.exit_time, x + h - vk.param, dom.hi - vk.param});
    if (!(lo < hi)) return {0.0, 0.0};
    std::vector<double> cuts{lo, hi};
    for (double c : {dom.lo + h - vk.param, dom.hi - h - vk.param})
      if (c > lo && c < hi) cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    const GaussLegendre& gl = gauss_legendre(cfg.quadrature_order);
    double acc0 = 0.0, acc1 = 0.0;
    for (std::size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
      double mid = 0.5 * (cuts[seg] + cuts[seg + 1]);
      double half = 0.5 * (cuts[seg + 1] - cuts[seg]);
      if (!(half > 0.0)) continue;
      for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
        double s = mid + half * gl.nodes[q];
        double kb = boundary_kernel(x, vk.param + s, h, dom);
        double val = interp_clamped(gj, comps[j], vj.param + s);
        acc0 += gl.weights[q] * half * kb * val;
        if (with_linear) acc1 += gl.weights[q] * half * kb * val * (x - vk.param - s) / h;
      }
    }
    return {acc0, acc1};
  }
};

AdditiveFit init_state(const EvaluationGrid& grid, const FitConfig& config, double alpha_star,
                       const std::vector<std::vector<double>>& exposure, Estimator which,
                       bool with_derivatives) {
  AdditiveFit fit;
  fit.grid = grid;
  fit.intercept = alpha_star;
  fit.estimator = which;
  fit.norming = config.norming;
  fit.bandwidth.resize(grid.n_dims());
  for (int k = 0; k < grid.n_dims(); ++k) fit.bandwidth[k] = config.bandwidth_for(k);
  fit.components.resize(grid.n_dims());
  if (with_derivatives) fit.derivatives.resize(grid.n_dims());
  fit.supported.resize(grid.n_dims());
  fit.centering_weights.resize(grid.n_dims());
  for (int k = 0; k < grid.n_dims(); ++k) {
    int np = grid.dims[k].n_points;
    fit.supported[k] = support_mask(exposure[k]);
    fit.components[k].assign(np, 0.0);
    if (with_derivatives) fit.derivatives[k].assign(np, 0.0);
    auto& w = fit.centering_weights[k];
    w.assign(np, 0.0);
    for (int i = 0; i < np; ++i)
      if (fit.supported[k][i])
        w[i] = config.norming == Norming::ExposureWeighted ? exposure[k][i] : 1.0;
  }
  return fit;
}

}  // namespace

AdditiveFit classic_lc_fit(const Dataset& data, const LcMarginals& m, const EvaluationGrid& grid,
                           const FitConfig& config) {
  check_fit_config(config, grid);
  const int nd = grid.n_dims();
  AdditiveFit fit = init_state(grid, config, m.alpha_star, m.E,
                               Estimator::LocalConstantClassic, false);
  MovingCache cache = build_moving_cache(data, grid, config, false);

  std::vector<std::vector<double>> tw(nd);
  for (int k = 0; k < nd; ++k) tw[k] = detail::trap_weights(grid.dims[k]);

  // start from the centered pilot ratios, as in the smooth variant
  PilotCurves pilot = lc_pilot_estimates(m);
  for (int k = 0; k < nd; ++k) {
    fit.components[k] = pilot.values[k];
    detail::center_curve(fit.components[k], tw[k], m.E[k], fit.supported[k], config.norming);
  }

  std::vector<std::vector<double>> prev;
  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    prev = fit.components;
    for (int k = 0; k < nd; ++k) {
      CrossAccumulator cross(data, grid, config, cache, fit.components);
      std::vector<double> cross0(grid.dims[k].n_points, 0.0);
      cross.accumulate(k, cross0, nullptr);
      auto& comp = fit.components[k];
      for (int i = 0; i < grid.dims[k].n_points; ++i) {
        if (!fit.supported[k][i]) {
          comp[i] = 0.0;
          continue;
        }
        comp[i] = (m.O[k][i] - m.alpha_star * m.E[k][i] - cross0[i]) / m.E[k][i];
      }
      detail::center_curve(comp, tw[k], m.E[k], fit.supported[k], config.norming);
    }
    auto crit = detail::sweep_criterion(tw, prev, fit.components, fit.supported,
                                        config.tol_offset);
    fit.iterations_used = iter;
    fit.final_criterion = crit.finite ? crit.value() : std::numeric_limits<double>::quiet_NaN();
    if (!crit.finite || crit.value() > detail::kDivergenceRatio) {
      fit.components = prev;
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

AdditiveFit classic_lc_fit(const Dataset& data, const EvaluationGrid& grid,
                           const FitConfig& config) {
  LcMarginals m = build_lc_marginals(data, grid, config, false);
  return classic_lc_fit(data, m, grid, config);
}

AdditiveFit classic_ll_fit(const Dataset& data, const LlMarginals& m, const EvaluationGrid& grid,
                           const FitConfig& config) {
  check_fit_config(config, grid);
  const int nd = grid.n_dims();
  AdditiveFit fit = init_state(grid, config, m.alpha_star, m.V00,
                               Estimator::LocalLinearClassic, true);
  MovingCache cache = build_moving_cache(data, grid, config, true);

  std::vector<std::vector<double>> tw(nd);
  for (int k = 0; k < nd; ++k) tw[k] = detail::trap_weights(grid.dims[k]);

  std::vector<std::vector<std::uint8_t>> dmask(nd);
  for (int k = 0; k < nd; ++k) {
    dmask[k] = support_mask(m.Vff[k]);
    for (int i = 0; i < grid.dims[k].n_points; ++i) dmask[k][i] = dmask[k][i] && fit.supported[k][i];
  }

  std::vector<std::vector<double>> prev, prev_deriv;
  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    prev = fit.components;
    prev_deriv = fit.derivatives;
    for (int j = 0; j < nd; ++j) {
      const int np = grid.dims[j].n_points;
      // other components enter as their local-linear prediction at the
      // observation: value plus the h-scaled slope coefficient
      std::vector<std::vector<double>> combined = fit.components;
      for (int l = 0; l < nd; ++l)
        for (int i = 0; i < grid.dims[l].n_points; ++i)
          combined[l][i] += fit.derivatives[l][i];
      CrossAccumulator cross(data, grid, config, cache, combined);
      std::vector<double> cross0(np, 0.0), cross1(np, 0.0);
      cross.accumulate(j, cross0, &cross1);

      // classical local linear smooth of the partial residuals: the joint
      // per-point 2x2 solve, matrix inverse and all. Ill-conditioned design
      // points amplify noise here; that is the baseline's documented behavior
      // and the fit-level divergence flag catches true blow-ups.
      auto& val = fit.components[j];
      auto& der = fit.derivatives[j];
      for (int i = 0; i < np; ++i) {
        if (!fit.supported[j][i]) {
          val[i] = 0.0;
          der[i] = 0.0;
          continue;
        }
        double v00 = m.V00[j][i], vf = m.Vf[j][i], vff = m.Vff[j][i];
        double r0 = m.U0[j][i] - m.alpha_star * v00 - cross0[i];
        double r1 = m.Uf[j][i] - m.alpha_star * vf - cross1[i];
        double det = v00 * vff - vf * vf;
        if (det == 0.0 || !dmask[j][i]) {
          val[i] = r0 / v00;
          der[i] = 0.0;
          continue;
        }
        val[i] = (vff * r0 - vf * r1) / det;
        der[i] = (v00 * r1 - vf * r0) / det;
      }
      detail::center_curve(val, tw[j], m.V00[j], fit.supported[j], config.norming);
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

AdditiveFit classic_ll_fit(const Dataset& data, const EvaluationGrid& grid,
                           const FitConfig& config) {
  LlMarginals m = build_ll_marginals(data, grid, config, false);
  return classic_ll_fit(data, m, grid, config);
}

}  // namespace hazsbf
