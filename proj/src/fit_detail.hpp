#pragma once

// Internal helpers shared by the backfitting fitters.

#include <cmath>
#include <cstdint>
#include <vector>

#include "hazsbf/types.hpp"

namespace hazsbf::detail {

inline std::vector<double> trap_weights(const DimensionGrid& g) {
  std::vector<double> w(g.n_points);
  for (int i = 0; i < g.n_points; ++i) w[i] = g.trap_weight(i);
  return w;
}

inline double masked_trap(const std::vector<double>& tw, const std::vector<double>& f,
                          const std::vector<std::uint8_t>& mask) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (mask[i]) s += tw[i] * f[i];
  return s;
}

// Centering constant of a curve under the fit's norming: either the
// exposure-weighted or the plain (uniform) trapezoid mean over supported nodes.
inline double centering_constant(const std::vector<double>& tw, const std::vector<double>& curve,
                                 const std::vector<double>& exposure,
                                 const std::vector<std::uint8_t>& mask, Norming norming) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (!mask[i]) continue;
    double w = norming == Norming::ExposureWeighted ? tw[i] * exposure[i] : tw[i];
    num += w * curve[i];
    den += w;
  }
  return den > 0.0 ? num / den : 0.0;
}

// Subtract the centering constant on supported nodes; unsupported stay zero.
inline void center_curve(std::vector<double>& curve, const std::vector<double>& tw,
                         const std::vector<double>& exposure,
                         const std::vector<std::uint8_t>& mask, Norming norming) {
  double c = centering_constant(tw, curve, exposure, mask, norming);
  for (std::size_t i = 0; i < curve.size(); ++i) curve[i] = mask[i] ? curve[i] - c : 0.0;
}

struct CriterionParts {
  double numerator = 0.0;
  double denominator = 0.0;  // includes tol_offset
  bool finite = true;
  double value() const { return numerator / denominator; }
};

inline CriterionParts sweep_criterion(const std::vector<std::vector<double>>& tw,
                                      const std::vector<std::vector<double>>& prev,
                                      const std::vector<std::vector<double>>& next,
                                      const std::vector<std::vector<std::uint8_t>>& mask,
                                      double tol_offset) {
  CriterionParts c;
  c.denominator = tol_offset;
  for (std::size_t k = 0; k < next.size(); ++k) {
    for (std::size_t i = 0; i < next[k].size(); ++i) {
      if (!mask[k][i]) continue;
      if (!std::isfinite(next[k][i])) c.finite = false;
      double d = next[k][i] - prev[k][i];
      c.numerator += tw[k][i] * d * d;
      c.denominator += tw[k][i] * next[k][i] * next[k][i];
    }
  }
  if (!std::isfinite(c.numerator) || !std::isfinite(c.denominator)) c.finite = false;
  return c;
}

constexpr double kDivergenceRatio = 1e6;

}  // namespace hazsbf::detail
