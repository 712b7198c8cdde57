#pragma once

#include <cstdint>
#include <vector>

#include "hazsbf/kernel.hpp"
#include "hazsbf/types.hpp"

namespace hazsbf {

// Dense 2-d table over grid(a) x grid(b), a < b, a-index major.
struct PairTable {
  int dim_a = 0, dim_b = 0;
  int na = 0, nb = 0;
  std::vector<double> values;

  double at(int ia, int ib) const { return values[static_cast<std::size_t>(ia) * nb + ib]; }
  double& at(int ia, int ib) { return values[static_cast<std::size_t>(ia) * nb + ib]; }
};

inline int pair_index(int a, int b, int n_dims) {
  // index of unordered pair (a < b) among all pairs of 0..n_dims-1
  return a * n_dims - a * (a + 1) / 2 + (b - a - 1);
}

// Local constant occurrence/exposure marginals.
struct LcMarginals {
  std::vector<std::vector<double>> O;  // per-dim occurrence curves
  std::vector<std::vector<double>> E;  // per-dim exposure curves
  std::vector<PairTable> E_pair;       // exposure tables, unordered pairs
  double alpha_star = 0.0;             // total events / total exposure
  long total_events = 0;
  double total_exposure = 0.0;
  bool has_pairs = false;

  // E_{j,k}(x_j, x_k), either orientation
  double E_jk(int j, int k, int ij, int ik, int n_dims) const {
    return j < k ? E_pair[pair_index(j, k, n_dims)].at(ij, ik)
                 : E_pair[pair_index(k, j, n_dims)].at(ik, ij);
  }
};

// Local linear tables. Factor means the (x - X(s))/h design column of the
// named dimension. Pairwise tables are stored once per unordered pair with
// the factor attached to dim_a (Fa), dim_b (Fb) or both (Fab).
struct LlMarginals {
  std::vector<std::vector<double>> V00;  // == LC exposure
  std::vector<std::vector<double>> Vf;   // linear factor, V^j_{j,0}
  std::vector<std::vector<double>> Vff;  // quadratic factor, V^j_{j,j}
  std::vector<std::vector<double>> U0;   // == LC occurrence
  std::vector<std::vector<double>> Uf;   // occurrence with linear factor
  std::vector<PairTable> P00, PFa, PFb, PFab;
  double alpha_star = 0.0;
  long total_events = 0;
  double total_exposure = 0.0;
  bool has_pairs = false;

  double pair00(int l, int j, int il, int ij, int n_dims) const {
    return l < j ? P00[pair_index(l, j, n_dims)].at(il, ij)
                 : P00[pair_index(j, l, n_dims)].at(ij, il);
  }
  // factor on the first listed dimension l: V^{l,j}_{l,0}(x_l, x_j)
  double pair_f_first(int l, int j, int il, int ij, int n_dims) const {
    return l < j ? PFa[pair_index(l, j, n_dims)].at(il, ij)
                 : PFb[pair_index(j, l, n_dims)].at(ij, il);
  }
  // factor on the second listed dimension j: V^{l,j}_{0,j}(x_l, x_j)
  double pair_f_second(int l, int j, int il, int ij, int n_dims) const {
    return l < j ? PFb[pair_index(l, j, n_dims)].at(il, ij)
                 : PFa[pair_index(j, l, n_dims)].at(ij, il);
  }
  double pair_ff(int l, int j, int il, int ij, int n_dims) const {
    return l < j ? PFab[pair_index(l, j, n_dims)].at(il, ij)
                 : PFab[pair_index(j, l, n_dims)].at(ij, il);
  }
};

// with_pairs = false skips the two-dimensional tables; classical backfitting
// and pilots only need the one-dimensional ones.
LcMarginals build_lc_marginals(const Dataset& data, const EvaluationGrid& grid,
                               const FitConfig& config, bool with_pairs = true);
LlMarginals build_ll_marginals(const Dataset& data, const EvaluationGrid& grid,
                               const FitConfig& config, bool with_pairs = true);

// Unstructured pilots. LC is the pointwise ratio O/E, LL the per-point 2x2
// solve; points without exposure support are flagged and zeroed, LL points
// with a near-singular design fall back to the LC ratio with zero slope.
struct PilotCurves {
  std::vector<std::vector<double>> values;
  std::vector<std::vector<double>> derivatives;          // LL only
  std::vector<std::vector<std::uint8_t>> supported;
  std::vector<std::vector<std::uint8_t>> ll_fallback;    // LL only
};

PilotCurves lc_pilot_estimates(const LcMarginals& m);
PilotCurves ll_pilot_estimates(const LlMarginals& m);

// Relative floor under which a grid point counts as unsupported.
inline constexpr double kExposureFloorRel = 1e-10;
// Relative determinant floor for the per-point local linear 2x2 solve.
inline constexpr double kDetFloorRel = 1e-12;

std::vector<std::uint8_t> support_mask(const std::vector<double>& exposure);

}  // namespace hazsbf
