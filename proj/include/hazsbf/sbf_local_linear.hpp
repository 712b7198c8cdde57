#pragma once

#include "hazsbf/marginals.hpp"
#include "hazsbf/types.hpp"

namespace hazsbf {

// One stabilized update of dimension j: first the value curve from the latest
// derivative curve, recentered, then the derivative curve from the freshly
// updated value curve. Other dimensions enter Gauss-Seidel style through the
// state held in `current`.
struct LlUpdate {
  std::vector<double> value;       // centered
  std::vector<double> derivative;  // (x - X)/h regression coefficient
};

LlUpdate ll_backfit_update(const AdditiveFit& current, const LlMarginals& marginals, int j,
                           const EvaluationGrid& grid, const FitConfig& config);

AdditiveFit ll_fit(const LlMarginals& marginals, const EvaluationGrid& grid,
                   const FitConfig& config);
AdditiveFit ll_fit(const Dataset& data, const EvaluationGrid& grid, const FitConfig& config);

// Residuals of the two stationarity equations the converged fit must satisfy,
// relative to the local scale of their terms; used by verification suites.
struct LlResiduals {
  std::vector<std::vector<double>> value_eq;
  std::vector<std::vector<double>> slope_eq;
};

LlResiduals ll_first_order_residuals(const AdditiveFit& fit, const LlMarginals& marginals,
                                     const EvaluationGrid& grid);

}  // namespace hazsbf
