#pragma once

#include "hazsbf/marginals.hpp"
#include "hazsbf/types.hpp"

namespace hazsbf {

// One Gauss-Seidel update of component k: the raw update subtracts the
// smoothed cross terms of all other components from the pilot ratio, the
// centered curve additionally satisfies the norming constraint.
struct LcUpdate {
  std::vector<double> raw;
  std::vector<double> centered;
};

LcUpdate lc_backfit_update(const AdditiveFit& current, const LcMarginals& marginals, int k,
                           const EvaluationGrid& grid, const FitConfig& config);

// Local constant smooth backfitting. The marginals overload lets callers
// reuse prebuilt (or synthetic) tables; the dataset overload builds them.
AdditiveFit lc_fit(const LcMarginals& marginals, const EvaluationGrid& grid,
                   const FitConfig& config);
AdditiveFit lc_fit(const Dataset& data, const EvaluationGrid& grid, const FitConfig& config);

}  // namespace hazsbf
