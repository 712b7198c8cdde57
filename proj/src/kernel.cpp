#include "hazsbf/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace hazsbf {

namespace {

constexpr double kPi = 3.14159265358979323846;

GaussLegendre compute_gauss_legendre(int n) {
  GaussLegendre gl;
  gl.nodes.resize(n);
  gl.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    gl.nodes[i] = -z;
    gl.nodes[n - 1 - i] = z;
    gl.weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    gl.weights[n - 1 - i] = gl.weights[i];
  }
  return gl;
}

}  // namespace

const GaussLegendre& gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  static std::mutex mu;
  static std::map<int, GaussLegendre> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_gauss_legendre(order)).first;
  return it->second;
}

double kernel_value(double u) {
  if (u < -1.0 || u > 1.0) return 0.0;
  return 0.75 * (1.0 - u * u);
}

double kernel_cdf(double u) {
  if (u <= -1.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return 0.5 + 0.75 * u - 0.25 * u * u * u;
}

double kernel_moment_primitive(int power, double u) {
  const double u2 = u * u;
  switch (power) {
    case 0: return 0.75 * (u - u * u2 / 3.0);
    case 1: return 0.75 * (u2 / 2.0 - u2 * u2 / 4.0);
    case 2: return 0.75 * (u * u2 / 3.0 - u * u2 * u2 / 5.0);
    default: throw std::invalid_argument("kernel_moment_primitive: power must be 0, 1 or 2");
  }
}

double boundary_normalizer(double v, double h, Interval domain) {
  return kernel_cdf((domain.hi - v) / h) - kernel_cdf((domain.lo - v) / h);
}

double boundary_kernel(double u, double v, double h, Interval domain) {
  if (u < domain.lo || u > domain.hi || v < domain.lo || v > domain.hi) return 0.0;
  double t = (u - v) / h;
  if (t < -1.0 || t > 1.0) return 0.0;
  return kernel_value(t) / (h * boundary_normalizer(v, h, domain));
}

namespace {

// Collects the subset of candidate breakpoints falling strictly inside (a, b).
void add_breaks(std::vector<double>& cuts, std::span<const double> candidates,
                double a, double b) {
  for (double c : candidates)
    if (c > a && c < b) cuts.push_back(c);
}

}  // namespace

double kernel_moment_integral(double x, double a, double b, double h, Interval domain,
                              int power, int quadrature_order) {
  if (!(a <= b)) throw std::invalid_argument("kernel_moment_integral: needs a <= b");
  if (x < domain.lo || x > domain.hi) return 0.0;
  double lo = std::max({a, domain.lo, x - h});
  double hi = std::min({b, domain.hi, x + h});
  if (!(lo < hi)) return 0.0;

  std::vector<double> cuts{lo, hi};
  const double candidates[] = {domain.lo + h, domain.hi - h};
  add_breaks(cuts, candidates, lo, hi);
  std::sort(cuts.begin(), cuts.end());

  const double interior_lo = domain.lo + h;
  const double interior_hi = domain.hi - h;
  const GaussLegendre& gl = gauss_legendre(quadrature_order);

  double total = 0.0;
  for (std::size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
    double s0 = cuts[seg], s1 = cuts[seg + 1];
    if (!(s1 > s0)) continue;
    double mid = 0.5 * (s0 + s1);
    if (mid >= interior_lo && mid <= interior_hi) {
      // normalizer == 1: substitute u = (x - s)/h and use the primitive
      double u0 = (x - s0) / h;
      double u1 = (x - s1) / h;
      total += kernel_moment_primitive(power, u0) - kernel_moment_primitive(power, u1);
    } else {
      double half = 0.5 * (s1 - s0);
      double acc = 0.0;
      for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
        double s = mid + half * gl.nodes[q];
        double u = (x - s) / h;
        double f = kernel_value(u) / (h * boundary_normalizer(s, h, domain));
        if (power == 1) f *= u;
        else if (power == 2) f *= u * u;
        acc += gl.weights[q] * f;
      }
      total += half * acc;
    }
  }
  return total;
}

double product_kernel_integral(std::span<const MovingKernelFactor> factors,
                               double a, double b, int quadrature_order) {
  if (!(a <= b)) throw std::invalid_argument("product_kernel_integral: needs a <= b");
  double lo = a, hi = b;
  for (const auto& f : factors) {
    // s must keep offset + s inside the domain and within h of x
    lo = std::max({lo, f.domain.lo - f.offset, f.x - f.h - f.offset});
    hi = std::min({hi, f.domain.hi - f.offset, f.x + f.h - f.offset});
    if (f.x < f.domain.lo || f.x > f.domain.hi) return 0.0;
  }
  if (!(lo < hi)) return 0.0;

  std::vector<double> cuts{lo, hi};
  for (const auto& f : factors) {
    const double candidates[] = {f.domain.lo + f.h - f.offset, f.domain.hi - f.h - f.offset};
    add_breaks(cuts, candidates, lo, hi);
  }
  std::sort(cuts.begin(), cuts.end());

  const GaussLegendre& gl = gauss_legendre(quadrature_order);
  double total = 0.0;
  for (std::size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
    double s0 = cuts[seg], s1 = cuts[seg + 1];
    if (!(s1 > s0)) continue;
    double mid = 0.5 * (s0 + s1), half = 0.5 * (s1 - s0);
    double acc = 0.0;
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      double s = mid + half * gl.nodes[q];
      double prod = 1.0;
      for (const auto& f : factors) {
        double u = (f.x - f.offset - s) / f.h;
        double val = kernel_value(u) / (f.h * boundary_normalizer(f.offset + s, f.h, f.domain));
        if (f.power == 1) val *= u;
        else if (f.power == 2) val *= u * u;
        prod *= val;
      }
      acc += gl.weights[q] * prod;
    }
    total += half * acc;
  }
  return total;
}

}  // namespace hazsbf
