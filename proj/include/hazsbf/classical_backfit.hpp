#pragma once

#include "hazsbf/marginals.hpp"
#include "hazsbf/types.hpp"

namespace hazsbf {

// Classical (non-smooth) backfitting: only the component being updated is
// kernel-smoothed, the others enter pointwise at the observation covariates.
// Divergence (blow-up or non-finite values) is reported through the fit
// flags, never thrown, so Monte Carlo drivers can tabulate it.
AdditiveFit classic_lc_fit(const Dataset& data, const LcMarginals& marginals,
                           const EvaluationGrid& grid, const FitConfig& config);
AdditiveFit classic_lc_fit(const Dataset& data, const EvaluationGrid& grid,
                           const FitConfig& config);

AdditiveFit classic_ll_fit(const Dataset& data, const LlMarginals& marginals,
                           const EvaluationGrid& grid, const FitConfig& config);
AdditiveFit classic_ll_fit(const Dataset& data, const EvaluationGrid& grid,
                           const FitConfig& config);

}  // namespace hazsbf
