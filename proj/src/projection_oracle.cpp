#include "hazsbf/projection_oracle.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hazsbf/kernel.hpp"
#include "hazsbf/util.hpp"

namespace hazsbf {

namespace {

struct CellIter {
  const EvaluationGrid& grid;
  std::vector<int> idx;
  bool done = false;

  explicit CellIter(const EvaluationGrid& g) : grid(g), idx(g.n_dims(), 0) {}

  void advance() {
    for (int k = grid.n_dims() - 1; k >= 0; --k) {
      if (++idx[k] < grid.dims[k].n_points) return;
      idx[k] = 0;
    }
    done = true;
  }

  double weight() const {
    double w = 1.0;
    for (int k = 0; k < grid.n_dims(); ++k) w *= grid.dims[k].trap_weight(idx[k]);
    return w;
  }
};

std::int64_t cell_count(const EvaluationGrid& grid) {
  std::int64_t n = 1;
  for (const auto& d : grid.dims) n *= d.n_points;
  return n;
}

}  // namespace

FullGridPilot build_full_pilot(const Dataset& data, const EvaluationGrid& grid,
                               const FitConfig& config) {
  check_fit_config(config, grid);
  if (data.records.empty()) throw std::invalid_argument("build_full_pilot: empty dataset");
  const int d = grid.covariate_dim();
  if (d > kOracleMaxDim)
    throw std::invalid_argument("build_full_pilot: supports at most d = " +
                                std::to_string(kOracleMaxDim) + " covariates, got " +
                                std::to_string(d));
  std::int64_t cells = cell_count(grid);
  if (cells > kOracleMaxCells)
    throw std::invalid_argument("build_full_pilot: grid has " + std::to_string(cells) +
                                " cells, budget is " + std::to_string(kOracleMaxCells));

  FullGridPilot pilot;
  pilot.grid = grid;
  pilot.n_cells = cells;
  pilot.O_full.assign(cells, 0.0);
  pilot.E_full.assign(cells, 0.0);
  const int nd = grid.n_dims();
  const int n = data.n();

  // enumerate cells once; contributions accumulated in record order
  std::vector<std::vector<int>> cell_index(cells, std::vector<int>(nd));
  {
    CellIter it(grid);
    for (std::int64_t c = 0; c < cells; ++c, it.advance()) cell_index[c] = it.idx;
  }

  parallel_for(static_cast<std::size_t>(cells), config.threads, [&](std::size_t c) {
    const auto& idx = cell_index[c];
    std::vector<double> x(nd);
    for (int k = 0; k < nd; ++k) x[k] = grid.dims[k].point(idx[k]);
    std::vector<double> e_parts, o_parts;
    std::vector<MovingKernelFactor> moving;
    for (const auto& r : data.records) {
      // occurrence: product kernel at the exit position
      if (r.event) {
        double prod = 1.0;
        for (int k = 0; k < nd && prod != 0.0; ++k) {
          double pos = k == 0 ? r.exit_time
                              : (r.covariates[k - 1].moves()
                                     ? r.covariates[k - 1].param + r.exit_time
                                     : r.covariates[k - 1].param);
          Interval dom{grid.dims[k].lo, grid.dims[k].hi};
          prod *= boundary_kernel(x[k], pos, config.bandwidth_for(k), dom);
        }
        if (prod != 0.0) o_parts.push_back(prod);
      }
      // exposure: constant channels factor out, moving ones integrate over s
      double const_factor = 1.0;
      moving.clear();
      moving.push_back({x[0], 0.0, config.bandwidth_for(0),
                        {grid.dims[0].lo, grid.dims[0].hi}, 0});
      for (int k = 1; k < nd && const_factor != 0.0; ++k) {
        Interval dom{grid.dims[k].lo, grid.dims[k].hi};
        const auto& ch = r.covariates[k - 1];
        if (ch.moves())
          moving.push_back({x[k], ch.param, config.bandwidth_for(k), dom, 0});
        else
          const_factor *= boundary_kernel(x[k], ch.param, config.bandwidth_for(k), dom);
      }
      if (const_factor == 0.0) continue;
      double integral = product_kernel_integral(moving, r.entry_time, r.exit_time,
                                                config.quadrature_order);
      if (integral != 0.0) e_parts.push_back(const_factor * integral);
    }
    pilot.E_full[c] = pairwise_sum(e_parts) / n;
    pilot.O_full[c] = pairwise_sum(o_parts) / n;
  });

  double e_max = 0.0;
  for (double e : pilot.E_full) e_max = std::max(e_max, e);
  double floor = kExposureFloorRel * e_max;
  pilot.alpha_full.assign(cells, 0.0);
  for (std::int64_t c = 0; c < cells; ++c)
    if (pilot.E_full[c] > floor) pilot.alpha_full[c] = pilot.O_full[c] / pilot.E_full[c];
  return pilot;
}

AdditiveFit oracle_solve(const FullGridPilot& pilot, const EvaluationGrid& grid,
                         Norming norming) {
  const int nd = grid.n_dims();
  int n_vars = 1;
  std::vector<int> offset(nd);
  for (int k = 0; k < nd; ++k) {
    offset[k] = n_vars;
    n_vars += grid.dims[k].n_points;
  }

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n_vars, n_vars);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_vars);

  CellIter it(grid);
  std::vector<int> vars(nd + 1);
  for (std::int64_t c = 0; c < pilot.n_cells; ++c, it.advance()) {
    double we = it.weight() * pilot.E_full[c];
    if (we == 0.0) continue;
    vars[0] = 0;
    for (int k = 0; k < nd; ++k) vars[k + 1] = offset[k] + it.idx[k];
    double target = we * pilot.alpha_full[c];
    for (int p = 0; p <= nd; ++p) {
      rhs(vars[p]) += target;
      for (int q = 0; q <= nd; ++q) A(vars[p], vars[q]) += we;
    }
  }

  // centering constraints; a zero diagonal block means degenerate exposure
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n_vars, nd);
  for (int k = 0; k < nd; ++k) {
    for (int i = 0; i < grid.dims[k].n_points; ++i) {
      int v = offset[k] + i;
      if (A(v, v) <= 0.0)
        throw std::runtime_error("oracle_solve: degenerate exposure in dimension " +
                                 std::to_string(k) + " at node " + std::to_string(i));
      C(v, k) = norming == Norming::ExposureWeighted ? A(v, v) : grid.dims[k].trap_weight(i);
    }
  }

  const int total = n_vars + nd;
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(total, total);
  kkt.topLeftCorner(n_vars, n_vars) = A;
  kkt.topRightCorner(n_vars, nd) = C;
  kkt.bottomLeftCorner(nd, n_vars) = C.transpose();
  Eigen::VectorXd full_rhs = Eigen::VectorXd::Zero(total);
  full_rhs.head(n_vars) = rhs;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
  if (!lu.isInvertible())
    throw std::runtime_error("oracle_solve: singular normal equations (degenerate exposure)");
  Eigen::VectorXd sol = lu.solve(full_rhs);

  AdditiveFit fit;
  fit.grid = grid;
  fit.intercept = sol(0);
  fit.norming = norming;
  fit.estimator = Estimator::LocalConstantSbf;
  fit.converged = true;
  fit.components.resize(nd);
  fit.supported.resize(nd);
  fit.centering_weights.resize(nd);
  for (int k = 0; k < nd; ++k) {
    int np = grid.dims[k].n_points;
    fit.components[k].resize(np);
    fit.supported[k].assign(np, 1);
    fit.centering_weights[k].resize(np);
    for (int i = 0; i < np; ++i) {
      fit.components[k][i] = sol(offset[k] + i);
      // A diagonal = tw_k(i) * trapezoid-marginal exposure
      fit.centering_weights[k][i] = norming == Norming::ExposureWeighted
                                        ? A(offset[k] + i, offset[k] + i) /
                                              grid.dims[k].trap_weight(i)
                                        : 1.0;
    }
  }
  return fit;
}

LcMarginals marginals_from_pilot(const FullGridPilot& pilot, const EvaluationGrid& grid) {
  const int nd = grid.n_dims();
  LcMarginals m;
  m.O.resize(nd);
  m.E.resize(nd);
  for (int k = 0; k < nd; ++k) {
    m.O[k].assign(grid.dims[k].n_points, 0.0);
    m.E[k].assign(grid.dims[k].n_points, 0.0);
  }
  m.has_pairs = nd > 1;
  if (m.has_pairs) {
    m.E_pair.resize(nd * (nd - 1) / 2);
    for (int a = 0; a < nd; ++a)
      for (int b = a + 1; b < nd; ++b) {
        PairTable& tab = m.E_pair[pair_index(a, b, nd)];
        tab.dim_a = a;
        tab.dim_b = b;
        tab.na = grid.dims[a].n_points;
        tab.nb = grid.dims[b].n_points;
        tab.values.assign(static_cast<std::size_t>(tab.na) * tab.nb, 0.0);
      }
  }

  double mass_e = 0.0, mass_o = 0.0;
  CellIter it(grid);
  for (std::int64_t c = 0; c < pilot.n_cells; ++c, it.advance()) {
    double w = it.weight();
    double we = w * pilot.E_full[c];
    // masked occurrence keeps the identity O = alpha * E exact per cell
    double wo = we * pilot.alpha_full[c];
    mass_e += we;
    mass_o += wo;
    for (int k = 0; k < nd; ++k) {
      double tw_k = grid.dims[k].trap_weight(it.idx[k]);
      m.E[k][it.idx[k]] += we / tw_k;
      m.O[k][it.idx[k]] += wo / tw_k;
    }
    for (int a = 0; a < nd; ++a)
      for (int b = a + 1; b < nd; ++b) {
        double tw_ab = grid.dims[a].trap_weight(it.idx[a]) * grid.dims[b].trap_weight(it.idx[b]);
        m.E_pair[pair_index(a, b, nd)].at(it.idx[a], it.idx[b]) += we / tw_ab;
      }
  }
  m.alpha_star = mass_e > 0.0 ? mass_o / mass_e : 0.0;
  m.total_exposure = mass_e;
  m.total_events = static_cast<long>(std::lround(mass_o));
  return m;
}

}  // namespace hazsbf
