#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "tvlab/riesz.hpp"

using namespace tvlab;

TEST_CASE("radial step function evaluation") {
  RadialStepFunction f({1.0, 2.0, 3.5}, {0.5, 0.0, 2.0});
  REQUIRE(f.eval(0.5) == 0.5);
  REQUIRE(f.eval(1.0) == 0.5);
  REQUIRE(f.eval(1.5) == 0.0);
  REQUIRE(f.eval(3.0) == 2.0);
  REQUIRE(f.eval(10.0) == 0.0);
  REQUIRE(f.support_radius() == 3.5);
  REQUIRE_THROWS_AS(RadialStepFunction({2.0, 1.0}, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("zero density has zero potential") {
  RadialStepFunction z({1.0, 2.0}, {0.0, 0.0});
  auto r = riesz_potential_radial(z, 1.5);
  REQUIRE(r.value == 0.0);
}

TEST_CASE("constant density on a far annulus evaluated at the origin") {
  // exact polar integral: I_1 = 2 pi * dens * (r2 - r1)
  const double r1 = 5.0, r2 = 8.0, dens = 0.3;
  RadialStepFunction z = RadialStepFunction::annulus(r1, r2, dens);
  auto r = riesz_potential_radial(z, 0.0);
  double expect = 2.0 * M_PI * dens * (r2 - r1);
  REQUIRE(r.value == Catch::Approx(expect).epsilon(1e-10));
}

TEST_CASE("quadrature self-convergence inside the annulus") {
  RadialStepFunction z = RadialStepFunction::annulus(4.0, 8.0, 1.0);
  QuadratureSpec coarse{256, 1024, -1.0};
  QuadratureSpec fine{512, 2048, -1.0};
  for (double xr : {4.5, 6.0, 7.9}) {
    double a = riesz_potential_radial(z, xr, coarse).value;
    double b = riesz_potential_radial(z, xr, fine).value;
    REQUIRE(std::abs(a - b) <= 0.01 * std::abs(b));
    REQUIRE(riesz_potential_radial(z, xr, fine).error_estimate <= 0.01 * std::abs(b));
  }
}

TEST_CASE("radon counterexample quantities") {
  SECTION("annulus curvature column") {
    auto r = radon_counterexample_margin(4, 0.25, 1.0, QuadratureSpec{128, 512, -1.0});
    REQUIRE(r.kappa_annulus == Catch::Approx(0.5).epsilon(1e-14));
  }

  SECTION("lower bound decays like n^{-1/2} and the margin turns positive") {
    std::vector<double> ns, lowers;
    QuadratureSpec spec{192, 768, -1.0};
    for (long n : {4L, 8L, 16L, 32L}) {
      auto r = radon_counterexample_margin(n, 0.25, 1.0, spec);
      ns.push_back(static_cast<double>(n));
      lowers.push_back(r.riesz_lower);
      if (n >= 8) REQUIRE(r.margin > 0.0);
    }
    double slope = fit_log_log_slope(ns, lowers);
    REQUIRE(std::abs(slope + 0.5) <= 0.1);
  }

  SECTION("parameter validation") {
    REQUIRE_THROWS_AS(radon_counterexample_margin(1, 0.25, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(radon_counterexample_margin(4, 0.7, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(radon_counterexample_margin(4, 0.25, 0.0), std::invalid_argument);
  }
}

TEST_CASE("log-log slope fitting") {
  std::vector<double> x = {1.0, 2.0, 4.0, 8.0};
  std::vector<double> y;
  for (double xi : x) y.push_back(3.0 * std::pow(xi, -0.5));
  REQUIRE(fit_log_log_slope(x, y) == Catch::Approx(-0.5).margin(1e-12));
}
