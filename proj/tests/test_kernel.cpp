#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hazsbf/kernel.hpp"
#include "hazsbf/util.hpp"
#include "support/quad.hpp"

using namespace hazsbf;

TEST_CASE("epanechnikov point values") {
  CHECK(kernel_value(0.0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(kernel_value(1.0) == 0.0);
  CHECK(kernel_value(-1.0) == 0.0);
  CHECK(kernel_value(1.5) == 0.0);
  CHECK(kernel_value(0.5) == doctest::Approx(0.5625).epsilon(1e-15));
  CHECK(kernel_value(-0.5) == kernel_value(0.5));
}

TEST_CASE("kernel integrates to one and is a second order kernel") {
  double mass = testsupport::integrate([](double u) { return kernel_value(u); }, -1.0, 1.0);
  CHECK(std::abs(mass - 1.0) < 1e-12);
  double m1 = testsupport::integrate([](double u) { return u * kernel_value(u); }, -1.0, 1.0);
  CHECK(std::abs(m1) < 1e-14);
  double m2 = testsupport::integrate([](double u) { return u * u * kernel_value(u); }, -1.0, 1.0);
  CHECK(std::abs(m2 - 0.2) < 1e-12);
}

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  const auto& gl = gauss_legendre(16);
  double w = 0.0;
  for (double x : gl.weights) w += x;
  CHECK(std::abs(w - 2.0) < 1e-14);
  // degree 23 polynomial, exact for order 16
  double acc = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    double u = gl.nodes[i];
    acc += gl.weights[i] * (std::pow(u, 23) + 3.0 * std::pow(u, 10) - u * u);
  }
  double expect = 2.0 * (3.0 / 11.0 - 1.0 / 3.0);
  CHECK(std::abs(acc - expect) < 1e-13);
}

TEST_CASE("boundary kernel reduces to plain kernel for interior v") {
  Interval dom{0.0, 1.0};
  double h = 0.2;
  double v = 0.5;
  for (double u : {0.35, 0.5, 0.62}) {
    CHECK(boundary_kernel(u, v, h, dom) ==
          doctest::Approx(kernel_value((u - v) / h) / h).epsilon(1e-14));
  }
}

TEST_CASE("boundary kernel at the edge doubles the mass") {
  Interval dom{0.0, 1.0};
  double h = 0.2;
  for (double u : {0.0, 0.05, 0.15}) {
    CHECK(boundary_kernel(u, 0.0, h, dom) ==
          doctest::Approx(2.0 * kernel_value(u / h) / h).epsilon(1e-13));
  }
  CHECK(boundary_kernel(-0.01, 0.0, h, dom) == 0.0);
  CHECK(boundary_kernel(0.3, 1.2, h, dom) == 0.0);
}

TEST_CASE("boundary kernel integrates to one in its first argument") {
  Interval dom{-1.25, 1.25};
  double h = 0.4;
  // 50 v values concentrated near both boundaries plus some interior ones
  for (int i = 0; i < 50; ++i) {
    double v;
    if (i < 20) v = dom.lo + (h * 1.5) * i / 19.0;
    else if (i < 40) v = dom.hi - (h * 1.5) * (i - 20) / 19.0;
    else v = -1.0 + 2.0 * (i - 40) / 9.0;
    double mass = testsupport::integrate(
        [&](double u) { return boundary_kernel(u, v, h, dom); }, dom.lo, dom.hi, 1e-13);
    CHECK(std::abs(mass - 1.0) < 1e-10);
  }
}

TEST_CASE("boundary kernel is symmetric for interior arguments") {
  Interval dom{0.0, 2.0};
  double h = 0.3;
  CHECK(boundary_kernel(0.8, 1.0, h, dom) == doctest::Approx(boundary_kernel(1.0, 0.8, h, dom)).epsilon(1e-15));
  CHECK(boundary_kernel(1.25, 1.1, h, dom) == doctest::Approx(boundary_kernel(1.1, 1.25, h, dom)).epsilon(1e-15));
}

TEST_CASE("kernel moment integral interior cases") {
  Interval dom{0.0, 1.0};
  double h = 0.1;
  double x = 0.5;
  CHECK(std::abs(kernel_moment_integral(x, 0.0, 1.0, h, dom, 0) - 1.0) < 1e-13);
  CHECK(std::abs(kernel_moment_integral(x, 0.0, 1.0, h, dom, 1)) < 1e-14);
  CHECK(std::abs(kernel_moment_integral(x, 0.0, 1.0, h, dom, 2) - 0.2) < 1e-10);
}

TEST_CASE("kernel moment integral power 0 equals one when the window is interior") {
  Interval dom{-1.25, 1.25};
  double h = 0.35;
  for (int i = 0; i <= 20; ++i) {
    double x = (dom.lo + 2.0 * h) + i * ((dom.hi - 2.0 * h) - (dom.lo + 2.0 * h)) / 20.0;
    CHECK(std::abs(kernel_moment_integral(x, dom.lo, dom.hi, h, dom, 0) - 1.0) < 1e-10);
  }
}

TEST_CASE("kernel moment integral agrees with adaptive quadrature") {
  Interval dom{-1.25, 1.25};
  Rng rng(20240811u);
  for (int trial = 0; trial < 60; ++trial) {
    double h = 0.1 + 0.9 * rng.uniform();
    double x = dom.lo + (dom.hi - dom.lo) * rng.uniform();
    double a = dom.lo - 0.2 + (dom.hi - dom.lo + 0.4) * rng.uniform();
    double b = a + (dom.hi - a + 0.2) * rng.uniform();
    int power = trial % 3;
    double got = kernel_moment_integral(x, a, b, h, dom, power);
    double ref = testsupport::integrate(
        [&](double s) {
          double u = (x - s) / h;
          double f = boundary_kernel(x, s, h, dom);
          if (power == 1) f *= u;
          if (power == 2) f *= u * u;
          return f;
        },
        std::max(a, dom.lo), std::min(b, dom.hi), 1e-13);
    CHECK(std::abs(got - ref) < 1e-9);
  }
}

TEST_CASE("product kernel integral matches quadrature for two moving factors") {
  Interval dom_t{0.0, 5.0};
  Interval dom_z{40.0, 66.0};
  Rng rng(777u);
  for (int trial = 0; trial < 30; ++trial) {
    MovingKernelFactor ft{1.0 + 3.0 * rng.uniform(), 0.0, 0.6, dom_t, trial % 2};
    MovingKernelFactor fz{42.0 + 20.0 * rng.uniform(), 40.0 + 15.0 * rng.uniform(), 1.5,
                          dom_z, (trial / 2) % 2};
    MovingKernelFactor fs[] = {ft, fz};
    double a = 0.0, b = 0.5 + 4.0 * rng.uniform();
    double got = product_kernel_integral(fs, a, b);
    double ref = testsupport::integrate(
        [&](double s) {
          double p = boundary_kernel(ft.x, s, ft.h, ft.domain);
          if (ft.power == 1) p *= (ft.x - s) / ft.h;
          double q = boundary_kernel(fz.x, fz.offset + s, fz.h, fz.domain);
          if (fz.power == 1) q *= (fz.x - fz.offset - s) / fz.h;
          return p * q;
        },
        a, b, 1e-13);
    CHECK(std::abs(got - ref) < 1e-9);
  }
}
