#include "hazsbf/marginals.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "hazsbf/util.hpp"

namespace hazsbf {

namespace {

// Uniform view of dimension k of a record: the time axis moves with offset 0,
// TimeOffset channels move with their offset, Constant channels stand still.
struct ChannelView {
  bool moves = false;
  double param = 0.0;
};

ChannelView channel_of(const SurvivalRecord& r, int dim) {
  if (dim == 0) return {true, 0.0};
  const auto& c = r.covariates[dim - 1];
  return {c.moves(), c.param};
}

double exit_position(const SurvivalRecord& r, int dim) {
  ChannelView v = channel_of(r, dim);
  return v.moves ? v.param + r.exit_time : v.param;
}

struct Window {
  int first = 0;
  int last = -1;
  bool empty() const { return first > last; }
};

Window position_window(const DimensionGrid& g, double pos_lo, double pos_hi, double h) {
  double lo = std::max(pos_lo - h, g.lo);
  double hi = std::min(pos_hi + h, g.hi);
  if (!(lo <= hi)) return {};
  Window w;
  w.first = std::max(0, static_cast<int>(std::ceil((lo - g.lo) / g.step() - 1e-12)));
  w.last = std::min(g.n_points - 1, static_cast<int>(std::floor((hi - g.lo) / g.step() + 1e-12)));
  return w;
}

Window channel_window(const DimensionGrid& g, const ChannelView& v, double entry, double exit,
                      double h) {
  if (v.moves) return position_window(g, v.param + entry, v.param + exit, h);
  return position_window(g, v.param, v.param, h);
}

// Accumulates per-record contributions in blocks so that the final per-cell
// sums are order-stable (pairwise over blocks, short plain sums inside).
constexpr int kBlock = 256;

class BlockedRow {
 public:
  BlockedRow(int n_cells, int n_records, int lanes)
      : n_cells_(n_cells), lanes_(lanes),
        n_blocks_(std::max((n_records + kBlock - 1) / kBlock, 1)),
        data_(static_cast<std::size_t>(n_cells) * lanes * n_blocks_, 0.0) {}

  void add(int record, int cell, int lane, double value) {
    data_[(static_cast<std::size_t>(record / kBlock) * n_cells_ + cell) * lanes_ + lane] += value;
  }

  double total(int cell, int lane) const {
    std::vector<double> parts(n_blocks_);
    for (int b = 0; b < n_blocks_; ++b)
      parts[b] = data_[(static_cast<std::size_t>(b) * n_cells_ + cell) * lanes_ + lane];
    return pairwise_sum(parts);
  }

 private:
  int n_cells_, lanes_, n_blocks_;
  std::vector<double> data_;
};

// All four pair moments m[.] = int ua^pa ub^pb bk_a bk_b ds in one
// Gauss-Legendre pass; both factors move with time.
std::array<double, 4> pair_moments_moving(double xa, double offa, double ha, Interval doma,
                                          double xb, double offb, double hb, Interval domb,
                                          double a, double b, int order) {
  std::array<double, 4> out{0.0, 0.0, 0.0, 0.0};
  if (xa < doma.lo || xa > doma.hi || xb < domb.lo || xb > domb.hi) return out;
  double lo = std::max({a, doma.lo - offa, xa - ha - offa, domb.lo - offb, xb - hb - offb});
  double hi = std::min({b, doma.hi - offa, xa + ha - offa, domb.hi - offb, xb + hb - offb});
  if (!(lo < hi)) return out;

  std::vector<double> cuts{lo, hi};
  for (double c : {doma.lo + ha - offa, doma.hi - ha - offa,
                   domb.lo + hb - offb, domb.hi - hb - offb})
    if (c > lo && c < hi) cuts.push_back(c);
  std::sort(cuts.begin(), cuts.end());

  const GaussLegendre& gl = gauss_legendre(order);
  for (std::size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
    double s0 = cuts[seg], s1 = cuts[seg + 1];
    if (!(s1 > s0)) continue;
    double mid = 0.5 * (s0 + s1), half = 0.5 * (s1 - s0);
    std::array<double, 4> acc{0.0, 0.0, 0.0, 0.0};
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      double s = mid + half * gl.nodes[q];
      double ua = (xa - offa - s) / ha;
      double ub = (xb - offb - s) / hb;
      double ka = kernel_value(ua) / (ha * boundary_normalizer(offa + s, ha, doma));
      double kb = kernel_value(ub) / (hb * boundary_normalizer(offb + s, hb, domb));
      double base = gl.weights[q] * ka * kb;
      acc[0] += base;
      acc[1] += base * ua;
      acc[2] += base * ub;
      acc[3] += base * ua * ub;
    }
    for (int m = 0; m < 4; ++m) out[m] += half * acc[m];
  }
  return out;
}

struct Totals {
  long events = 0;
  double exposure = 0.0;
};

Totals dataset_totals(const Dataset& data) {
  Totals t;
  std::vector<double> expo(data.records.size());
  for (std::size_t i = 0; i < data.records.size(); ++i) {
    expo[i] = data.records[i].exposure();
    if (data.records[i].event) ++t.events;
  }
  t.exposure = pairwise_sum(expo);
  return t;
}

}  // namespace

std::vector<std::uint8_t> support_mask(const std::vector<double>& exposure) {
  double mx = 0.0;
  for (double e : exposure) mx = std::max(mx, e);
  double floor = kExposureFloorRel * mx;
  std::vector<std::uint8_t> mask(exposure.size(), 0);
  for (std::size_t i = 0; i < exposure.size(); ++i)
    mask[i] = (mx > 0.0 && exposure[i] > floor) ? 1 : 0;
  return mask;
}

LcMarginals build_lc_marginals(const Dataset& data, const EvaluationGrid& grid,
                               const FitConfig& config, bool with_pairs) {
  check_fit_config(config, grid);
  if (data.records.empty()) throw std::invalid_argument("build_lc_marginals: empty dataset");
  const int nd = grid.n_dims();
  const int n = data.n();
  const int quad = config.quadrature_order;

  LcMarginals m;
  m.O.resize(nd);
  m.E.resize(nd);
  for (int k = 0; k < nd; ++k) {
    m.O[k].assign(grid.dims[k].n_points, 0.0);
    m.E[k].assign(grid.dims[k].n_points, 0.0);
  }

  // one-dimensional tables, one task per (dim, node)
  std::vector<std::pair<int, int>> tasks;
  for (int k = 0; k < nd; ++k)
    for (int i = 0; i < grid.dims[k].n_points; ++i) tasks.emplace_back(k, i);

  parallel_for(tasks.size(), config.threads, [&](std::size_t t) {
    auto [k, i] = tasks[t];
    const DimensionGrid& g = grid.dims[k];
    Interval dom{g.lo, g.hi};
    double h = config.bandwidth_for(k);
    double x = g.point(i);
    std::vector<double> e_parts, o_parts;
    e_parts.reserve(data.records.size());
    for (const auto& r : data.records) {
      ChannelView v = channel_of(r, k);
      double contrib;
      if (v.moves)
        contrib = kernel_moment_integral(x, v.param + r.entry_time, v.param + r.exit_time,
                                         h, dom, 0, quad);
      else
        contrib = r.exposure() * boundary_kernel(x, v.param, h, dom);
      if (contrib != 0.0) e_parts.push_back(contrib);
      if (r.event) {
        double o = boundary_kernel(x, exit_position(r, k), h, dom);
        if (o != 0.0) o_parts.push_back(o);
      }
    }
    m.E[k][i] = pairwise_sum(e_parts) / n;
    m.O[k][i] = pairwise_sum(o_parts) / n;
  });

  Totals totals = dataset_totals(data);
  m.total_events = totals.events;
  m.total_exposure = totals.exposure;
  m.alpha_star = totals.exposure > 0.0 ? totals.events / totals.exposure : 0.0;

  if (!with_pairs || nd < 2) return m;

  m.has_pairs = true;
  m.E_pair.resize(nd * (nd - 1) / 2);
  std::vector<std::array<int, 3>> rows;  // (dim_a, dim_b, row index)
  for (int a = 0; a < nd; ++a)
    for (int b = a + 1; b < nd; ++b) {
      PairTable& tab = m.E_pair[pair_index(a, b, nd)];
      tab.dim_a = a;
      tab.dim_b = b;
      tab.na = grid.dims[a].n_points;
      tab.nb = grid.dims[b].n_points;
      tab.values.assign(static_cast<std::size_t>(tab.na) * tab.nb, 0.0);
      for (int ia = 0; ia < tab.na; ++ia) rows.push_back({a, b, ia});
    }

  parallel_for(rows.size(), config.threads, [&](std::size_t t) {
    auto [a, b, ia] = rows[t];
    PairTable& tab = m.E_pair[pair_index(a, b, nd)];
    const DimensionGrid& ga = grid.dims[a];
    const DimensionGrid& gb = grid.dims[b];
    Interval doma{ga.lo, ga.hi}, domb{gb.lo, gb.hi};
    double ha = config.bandwidth_for(a), hb = config.bandwidth_for(b);
    double xa = ga.point(ia);

    BlockedRow row(tab.nb, n, 1);
    for (int rec = 0; rec < n; ++rec) {
      const auto& r = data.records[rec];
      ChannelView va = channel_of(r, a), vb = channel_of(r, b);
      Window wb = channel_window(gb, vb, r.entry_time, r.exit_time, hb);
      if (wb.empty()) continue;
      if (!va.moves) {
        double ka = boundary_kernel(xa, va.param, ha, doma);
        if (ka == 0.0) continue;
        if (!vb.moves) {
          double base = r.exposure() * ka;
          for (int ib = wb.first; ib <= wb.last; ++ib)
            row.add(rec, ib, 0, base * boundary_kernel(gb.point(ib), vb.param, hb, domb));
        } else {
          for (int ib = wb.first; ib <= wb.last; ++ib) {
            double bint = kernel_moment_integral(gb.point(ib), vb.param + r.entry_time,
                                                 vb.param + r.exit_time, hb, domb, 0, quad);
            if (bint != 0.0) row.add(rec, ib, 0, ka * bint);
          }
        }
      } else if (!vb.moves) {
        double aint = kernel_moment_integral(xa, va.param + r.entry_time,
                                             va.param + r.exit_time, ha, doma, 0, quad);
        if (aint == 0.0) continue;
        for (int ib = wb.first; ib <= wb.last; ++ib)
          row.add(rec, ib, 0, aint * boundary_kernel(gb.point(ib), vb.param, hb, domb));
      } else {
        for (int ib = wb.first; ib <= wb.last; ++ib) {
          MovingKernelFactor fa{xa, va.param, ha, doma, 0};
          MovingKernelFactor fb{gb.point(ib), vb.param, hb, domb, 0};
          MovingKernelFactor fs[] = {fa, fb};
          double val = product_kernel_integral(fs, r.entry_time, r.exit_time, quad);
          if (val != 0.0) row.add(rec, ib, 0, val);
        }
      }
    }
    for (int ib = 0; ib < tab.nb; ++ib) tab.at(ia, ib) = row.total(ib, 0) / n;
  });

  return m;
}

LlMarginals build_ll_marginals(const Dataset& data, const EvaluationGrid& grid,
                               const FitConfig& config, bool with_pairs) {
  check_fit_config(config, grid);
  if (data.records.empty()) throw std::invalid_argument("build_ll_marginals: empty dataset");
  const int nd = grid.n_dims();
  const int n = data.n();
  const int quad = config.quadrature_order;

  LlMarginals m;
  for (auto* curves : {&m.V00, &m.Vf, &m.Vff, &m.U0, &m.Uf}) {
    curves->resize(nd);
    for (int k = 0; k < nd; ++k) (*curves)[k].assign(grid.dims[k].n_points, 0.0);
  }

  std::vector<std::pair<int, int>> tasks;
  for (int k = 0; k < nd; ++k)
    for (int i = 0; i < grid.dims[k].n_points; ++i) tasks.emplace_back(k, i);

  parallel_for(tasks.size(), config.threads, [&](std::size_t t) {
    auto [k, i] = tasks[t];
    const DimensionGrid& g = grid.dims[k];
    Interval dom{g.lo, g.hi};
    double h = config.bandwidth_for(k);
    double x = g.point(i);
    std::vector<double> p0, p1, p2, o0, o1;
    for (const auto& r : data.records) {
      ChannelView v = channel_of(r, k);
      if (v.moves) {
        double a = v.param + r.entry_time, b = v.param + r.exit_time;
        double e0 = kernel_moment_integral(x, a, b, h, dom, 0, quad);
        if (e0 != 0.0) {
          p0.push_back(e0);
          p1.push_back(kernel_moment_integral(x, a, b, h, dom, 1, quad));
          p2.push_back(kernel_moment_integral(x, a, b, h, dom, 2, quad));
        }
      } else {
        double kv = boundary_kernel(x, v.param, h, dom);
        if (kv != 0.0) {
          double u = (x - v.param) / h;
          double base = r.exposure() * kv;
          p0.push_back(base);
          p1.push_back(base * u);
          p2.push_back(base * u * u);
        }
      }
      if (r.event) {
        double pos = exit_position(r, k);
        double kv = boundary_kernel(x, pos, h, dom);
        if (kv != 0.0) {
          double u = (x - pos) / h;
          o0.push_back(kv);
          o1.push_back(kv * u);
        }
      }
    }
    m.V00[k][i] = pairwise_sum(p0) / n;
    m.Vf[k][i] = pairwise_sum(p1) / n;
    m.Vff[k][i] = pairwise_sum(p2) / n;
    m.U0[k][i] = pairwise_sum(o0) / n;
    m.Uf[k][i] = pairwise_sum(o1) / n;
  });

  Totals totals = dataset_totals(data);
  m.total_events = totals.events;
  m.total_exposure = totals.exposure;
  m.alpha_star = totals.exposure > 0.0 ? totals.events / totals.exposure : 0.0;

  if (!with_pairs || nd < 2) return m;

  m.has_pairs = true;
  const int n_pairs = nd * (nd - 1) / 2;
  for (auto* tabs : {&m.P00, &m.PFa, &m.PFb, &m.PFab}) tabs->resize(n_pairs);
  std::vector<std::array<int, 3>> rows;
  for (int a = 0; a < nd; ++a)
    for (int b = a + 1; b < nd; ++b) {
      int p = pair_index(a, b, nd);
      for (auto* tabs : {&m.P00, &m.PFa, &m.PFb, &m.PFab}) {
        PairTable& tab = (*tabs)[p];
        tab.dim_a = a;
        tab.dim_b = b;
        tab.na = grid.dims[a].n_points;
        tab.nb = grid.dims[b].n_points;
        tab.values.assign(static_cast<std::size_t>(tab.na) * tab.nb, 0.0);
      }
      for (int ia = 0; ia < grid.dims[a].n_points; ++ia) rows.push_back({a, b, ia});
    }

  parallel_for(rows.size(), config.threads, [&](std::size_t t) {
    auto [a, b, ia] = rows[t];
    int p = pair_index(a, b, nd);
    const DimensionGrid& ga = grid.dims[a];
    const DimensionGrid& gb = grid.dims[b];
    Interval doma{ga.lo, ga.hi}, domb{gb.lo, gb.hi};
    double ha = config.bandwidth_for(a), hb = config.bandwidth_for(b);
    double xa = ga.point(ia);

    BlockedRow row(gb.n_points, n, 4);
    for (int rec = 0; rec < n; ++rec) {
      const auto& r = data.records[rec];
      ChannelView va = channel_of(r, a), vb = channel_of(r, b);
      Window wb = channel_window(gb, vb, r.entry_time, r.exit_time, hb);
      if (wb.empty()) continue;
      if (!va.moves && !vb.moves) {
        double ka = boundary_kernel(xa, va.param, ha, doma);
        if (ka == 0.0) continue;
        double ua = (xa - va.param) / ha;
        double base = r.exposure() * ka;
        for (int ib = wb.first; ib <= wb.last; ++ib) {
          double xb = gb.point(ib);
          double kb = boundary_kernel(xb, vb.param, hb, domb);
          if (kb == 0.0) continue;
          double ub = (xb - vb.param) / hb;
          double v00 = base * kb;
          row.add(rec, ib, 0, v00);
          row.add(rec, ib, 1, v00 * ua);
          row.add(rec, ib, 2, v00 * ub);
          row.add(rec, ib, 3, v00 * ua * ub);
        }
      } else if (!va.moves) {
        double ka = boundary_kernel(xa, va.param, ha, doma);
        if (ka == 0.0) continue;
        double ua = (xa - va.param) / ha;
        double lob = vb.param + r.entry_time, hib = vb.param + r.exit_time;
        for (int ib = wb.first; ib <= wb.last; ++ib) {
          double xb = gb.point(ib);
          double i0 = kernel_moment_integral(xb, lob, hib, hb, domb, 0, quad);
          if (i0 == 0.0) continue;
          double i1 = kernel_moment_integral(xb, lob, hib, hb, domb, 1, quad);
          row.add(rec, ib, 0, ka * i0);
          row.add(rec, ib, 1, ka * ua * i0);
          row.add(rec, ib, 2, ka * i1);
          row.add(rec, ib, 3, ka * ua * i1);
        }
      } else if (!vb.moves) {
        double loa = va.param + r.entry_time, hia = va.param + r.exit_time;
        double i0 = kernel_moment_integral(xa, loa, hia, ha, doma, 0, quad);
        if (i0 == 0.0) continue;
        double i1 = kernel_moment_integral(xa, loa, hia, ha, doma, 1, quad);
        for (int ib = wb.first; ib <= wb.last; ++ib) {
          double xb = gb.point(ib);
          double kb = boundary_kernel(xb, vb.param, hb, domb);
          if (kb == 0.0) continue;
          double ub = (xb - vb.param) / hb;
          row.add(rec, ib, 0, i0 * kb);
          row.add(rec, ib, 1, i1 * kb);
          row.add(rec, ib, 2, i0 * kb * ub);
          row.add(rec, ib, 3, i1 * kb * ub);
        }
      } else {
        for (int ib = wb.first; ib <= wb.last; ++ib) {
          auto mm = pair_moments_moving(xa, va.param, ha, doma, gb.point(ib), vb.param, hb,
                                        domb, r.entry_time, r.exit_time, quad);
          if (mm[0] == 0.0) continue;
          row.add(rec, ib, 0, mm[0]);
          row.add(rec, ib, 1, mm[1]);
          row.add(rec, ib, 2, mm[2]);
          row.add(rec, ib, 3, mm[3]);
        }
      }
    }
    for (int ib = 0; ib < gb.n_points; ++ib) {
      m.P00[p].at(ia, ib) = row.total(ib, 0) / n;
      m.PFa[p].at(ia, ib) = row.total(ib, 1) / n;
      m.PFb[p].at(ia, ib) = row.total(ib, 2) / n;
      m.PFab[p].at(ia, ib) = row.total(ib, 3) / n;
    }
  });

  return m;
}

PilotCurves lc_pilot_estimates(const LcMarginals& m) {
  PilotCurves out;
  out.values.resize(m.E.size());
  out.supported.resize(m.E.size());
  for (std::size_t k = 0; k < m.E.size(); ++k) {
    out.supported[k] = support_mask(m.E[k]);
    out.values[k].assign(m.E[k].size(), 0.0);
    for (std::size_t i = 0; i < m.E[k].size(); ++i)
      if (out.supported[k][i]) out.values[k][i] = m.O[k][i] / m.E[k][i];
  }
  return out;
}

PilotCurves ll_pilot_estimates(const LlMarginals& m) {
  PilotCurves out;
  const std::size_t nd = m.V00.size();
  out.values.resize(nd);
  out.derivatives.resize(nd);
  out.supported.resize(nd);
  out.ll_fallback.resize(nd);
  for (std::size_t k = 0; k < nd; ++k) {
    out.supported[k] = support_mask(m.V00[k]);
    const std::size_t np = m.V00[k].size();
    out.values[k].assign(np, 0.0);
    out.derivatives[k].assign(np, 0.0);
    out.ll_fallback[k].assign(np, 0);
    for (std::size_t i = 0; i < np; ++i) {
      if (!out.supported[k][i]) continue;
      double v00 = m.V00[k][i], vf = m.Vf[k][i], vff = m.Vff[k][i];
      double det = v00 * vff - vf * vf;
      if (vff <= 0.0 || det <= kDetFloorRel * v00 * vff) {
        out.values[k][i] = m.U0[k][i] / v00;
        out.ll_fallback[k][i] = 1;
        continue;
      }
      out.values[k][i] = (vff * m.U0[k][i] - vf * m.Uf[k][i]) / det;
      out.derivatives[k][i] = (v00 * m.Uf[k][i] - vf * m.U0[k][i]) / det;
    }
  }
  return out;
}

}  // namespace hazsbf
