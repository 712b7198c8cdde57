#pragma once

#include <cstdint>
#include <vector>

#include "hazsbf/marginals.hpp"
#include "hazsbf/types.hpp"

namespace hazsbf {

// Full-dimensional product-kernel occurrence/exposure arrays, row-major with
// dimension 0 slowest. Deliberately capped: this exists to certify the
// backfitting solution on small instances, not to scale.
struct FullGridPilot {
  EvaluationGrid grid;
  std::vector<double> O_full;
  std::vector<double> E_full;
  std::vector<double> alpha_full;  // O/E with an exposure floor, else 0
  std::int64_t n_cells = 0;
};

inline constexpr int kOracleMaxDim = 3;
inline constexpr std::int64_t kOracleMaxCells = 2'000'000;

FullGridPilot build_full_pilot(const Dataset& data, const EvaluationGrid& grid,
                               const FitConfig& config);

// Weighted least squares projection of the unstructured pilot onto additive
// surfaces on the grid: minimizes the exposure-weighted squared distance over
// node values and intercept subject to the centering constraints, by a dense
// constrained normal-equations solve. Throws on degenerate exposure, naming
// the offending dimension.
AdditiveFit oracle_solve(const FullGridPilot& pilot, const EvaluationGrid& grid,
                         Norming norming);

// Trapezoid marginalization of the pilot into backfitting tables. Feeding
// these to lc_fit reproduces oracle_solve exactly (same quadrature on both
// sides), which is what the equivalence suite exercises.
LcMarginals marginals_from_pilot(const FullGridPilot& pilot, const EvaluationGrid& grid);

}  // namespace hazsbf
