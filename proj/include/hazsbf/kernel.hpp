#pragma once

#include <span>
#include <vector>

#include "hazsbf/types.hpp"

namespace hazsbf {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

// Gauss-Legendre nodes/weights on [-1, 1], cached per order.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussLegendre& gauss_legendre(int order);

// Epanechnikov kernel k(u) = 0.75 (1 - u^2) on [-1, 1].
double kernel_value(double u);

// CDF of k: 0 below -1, 1 above 1.
double kernel_cdf(double u);

// Primitive of u^power * k(u) for power in {0, 1, 2}, valid on [-1, 1].
double kernel_moment_primitive(int power, double u);

// Mass of the scaled kernel k_h(. - v) inside [domain.lo, domain.hi]; the
// normalizer of the boundary-corrected kernel. Equals 1 when v is at least h
// away from both boundaries.
double boundary_normalizer(double v, double h, Interval domain);

// Boundary-corrected kernel k_h(u, v) = k_h(u - v) / int_domain k_h(s - v) ds
// for u, v inside the domain, 0 otherwise. Integrates to one over its first
// argument for every v.
double boundary_kernel(double u, double v, double h, Interval domain);

// int_a^b ((x - s)/h)^power * boundary_kernel(x, s, h, domain) ds.
//
// Piecewise-exact: on stretches where the normalizer is identically one the
// closed-form primitive is used; within h of a domain boundary the integrand
// is a smooth rational function and Gauss-Legendre of the given order is
// applied per segment.
double kernel_moment_integral(double x, double a, double b, double h, Interval domain,
                              int power, int quadrature_order = 16);

// One time-moving kernel factor ((x - off - s)/h)^power * k_h(x, off + s).
struct MovingKernelFactor {
  double x = 0.0;       // evaluation point
  double offset = 0.0;  // channel offset; position at time s is offset + s
  double h = 1.0;
  Interval domain;
  int power = 0;
};

// int_a^b prod_f factor_f(s) ds over time s, for up to a handful of moving
// factors (pairwise tables use two, the full-grid pilot up to d+1). Segments
// split at every kernel-support and normalizer breakpoint; Gauss-Legendre on
// each segment is exact for the polynomial stretches.
double product_kernel_integral(std::span<const MovingKernelFactor> factors,
                               double a, double b, int quadrature_order = 16);

}  // namespace hazsbf
