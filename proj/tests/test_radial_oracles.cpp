#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "tvlab/radial_oracles.hpp"

using namespace tvlab;

TEST_CASE("ball curvature values") {
  REQUIRE(ball_curvature(3, 1.0, 0.5) == Catch::Approx(3.0));
  REQUIRE(ball_curvature(2, 2.0, 1.0) == Catch::Approx(1.0));
  REQUIRE(ball_curvature(3, 1.0, 2.0) == Catch::Approx(-1.0));
  REQUIRE_THROWS_AS(ball_curvature(3, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("ball curvature mass identity (d/R)|B| = Per(B)") {
  for (int d : {2, 3, 4}) {
    double R = 1.7;
    double lhs = (d / R) * unit_ball_volume(d) * std::pow(R, d);
    double rhs = unit_ball_perimeter(d) * std::pow(R, d - 1);
    REQUIRE(std::abs(lhs - rhs) <= 1e-12 * rhs);
  }
}

TEST_CASE("annulus curvature") {
  REQUIRE(annulus_curvature(1.0, 2.0) == Catch::Approx(2.0));
  for (double n : {2.0, 3.0, 5.0, 11.0})
    REQUIRE(annulus_curvature(n, 2.0 * n) == Catch::Approx(2.0 / n).epsilon(1e-14));
  // widening annuli have monotonically vanishing curvature
  double prev = std::numeric_limits<double>::infinity();
  for (double w : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    double k = annulus_curvature(1.0, 1.0 + w);
    REQUIRE(k < prev);
    prev = k;
  }
  REQUIRE(prev <= 2.0 / 16.0);
  REQUIRE_THROWS_AS(annulus_curvature(2.0, 1.0), std::invalid_argument);
}

TEST_CASE("ROF ball plateau heights") {
  REQUIRE(rof_ball_height(2, 1.0, 1.0, 0.1) == Catch::Approx(0.8));
  REQUIRE(rof_ball_height(3, 1.0, 1.0, 1.0 / 3.0) == Catch::Approx(0.0).margin(1e-15));
  REQUIRE(rof_ball_height(2, 1.0, 1.0, 0.7) == 0.0);  // clamped
  REQUIRE(rof_ball_height_variant(3, 1.0, 1.0, 0.2) == Catch::Approx(1.0 - 0.3));
  REQUIRE_THROWS_AS(rof_ball_height(2, 1.0, -1.0, 0.1), std::invalid_argument);
}

TEST_CASE("two-ball oracle") {
  SECTION("strong regularization removes the perturbation") {
    TwoBallConfig cfg;
    cfg.r1 = 1.0;
    cfg.r2 = 0.2;
    cfg.separation = 3.0;
    cfg.c1 = 1.0;
    cfg.c2 = 0.05;
    cfg.alpha = 0.5;
    auto h = rof_two_balls_solution(cfg);
    REQUIRE(h.s == 0.0);
  }

  SECTION("main plateau follows 1 - 1/n under alpha = 1/(3n)") {
    for (int n : {1, 2, 3, 5}) {
      TwoBallConfig cfg;
      cfg.r1 = 1.0;
      cfg.r2 = 0.25;
      cfg.separation = 3.0;
      cfg.c1 = 1.0;
      cfg.c2 = 10.0;
      cfg.alpha = 1.0 / (3.0 * n);
      auto h = rof_two_balls_solution(cfg);
      REQUIRE(h.b == Catch::Approx(std::max(0.0, 1.0 - 1.0 / n)).margin(1e-14));
    }
  }

  SECTION("the defeat schedule keeps s = 1 for every n") {
    auto f = [](double t) { return t; };
    for (int n : {1, 2, 3, 4, 8}) {
      double rn = f(1.0 / n) * f(1.0 / n);
      TwoBallConfig cfg;
      cfg.r1 = 1.0;
      cfg.r2 = rn;
      cfg.separation = 3.0;
      cfg.c1 = 1.0;
      cfg.c2 = 1.0 / (n * rn) + 1.0;
      cfg.alpha = 1.0 / (3.0 * n);
      auto h = rof_two_balls_solution(cfg);
      REQUIRE(h.s == Catch::Approx(1.0).margin(1e-12));
    }
  }

  SECTION("far-apart hypothesis") {
    TwoBallConfig cfg;
    cfg.r1 = 1.0;
    cfg.r2 = 0.5;
    cfg.separation = 2.9;  // below 3 max(r1, r2) = 3
    REQUIRE_THROWS_WITH(rof_two_balls_solution(cfg),
                        Catch::Matchers::ContainsSubstring("far-apart"));
    cfg.separation = 3.0;  // boundary case is accepted
    REQUIRE_NOTHROW(rof_two_balls_solution(cfg));
    REQUIRE_FALSE(cfg.strictly_separated());
    cfg.separation = 3.5;
    REQUIRE(cfg.strictly_separated());
  }

  SECTION("overlapping balls are rejected outright") {
    TwoBallConfig cfg;
    cfg.r1 = 1.0;
    cfg.r2 = 0.5;
    cfg.separation = 1.2;
    REQUIRE_THROWS_AS(rof_two_balls_solution(cfg), std::invalid_argument);
  }
}

TEST_CASE("radial lambda sweep on a ball") {
  auto one = [](double) { return 1.0; };

  SECTION("transition at d/R and constant curvature inside") {
    RadialSet b = RadialSet::ball(3, 2.0);
    const double lamStar = 3.0 / 2.0;
    std::vector<double> grid;
    for (int i = 0; i <= 60; ++i) grid.push_back(0.5 * std::pow(4.0, i / 60.0));  // 0.5 .. 2
    auto sweep = lambda_sweep_radial(b, one, grid);
    REQUIRE(sweep.any_assigned);
    // every sampled radius activates at the first lambda above d/R
    double firstAbove = 0.0;
    for (double l : grid)
      if (l > lamStar) {
        firstAbove = l;
        break;
      }
    for (std::size_t i = 0; i < sweep.radii.size(); ++i) {
      REQUIRE(sweep.assigned[i]);
      REQUIRE(sweep.kappa[i] == Catch::Approx(firstAbove).epsilon(1e-12));
    }
    REQUIRE(radial_transition_lambda(b, one, 0.5, 2.0) == Catch::Approx(lamStar).epsilon(1e-10));
  }

  SECTION("sub-threshold sweep leaves everything unassigned") {
    RadialSet b = RadialSet::ball(3, 1.0);
    auto sweep = lambda_sweep_radial(b, one, {0.5, 1.0, 2.0, 2.9});
    REQUIRE_FALSE(sweep.any_assigned);
    REQUIRE(std::isinf(sweep.transition_lambda));
    for (bool a : sweep.assigned) REQUIRE_FALSE(a);
  }
}

TEST_CASE("radial lambda sweep on an annulus hits the curvature constant") {
  auto one = [](double) { return 1.0; };
  const double r1 = 1.0, r2 = 2.5;
  RadialSet a = RadialSet::annulus(r1, r2);
  const double kappa = annulus_curvature(r1, r2);

  double transition = radial_transition_lambda(a, one, 0.25 * kappa, 4.0 * kappa);
  REQUIRE(std::abs(transition - kappa) <= 1e-8 * kappa);

  std::vector<double> grid;
  for (int i = 0; i <= 80; ++i) grid.push_back(0.5 * kappa * std::pow(4.0, i / 80.0));
  auto sweep = lambda_sweep_radial(a, one, grid);
  REQUIRE(sweep.any_assigned);
  double firstAbove = 0.0;
  for (double l : grid)
    if (l > kappa) {
      firstAbove = l;
      break;
    }
  for (std::size_t i = 0; i < sweep.radii.size(); ++i) {
    REQUIRE(sweep.assigned[i]);
    REQUIRE(sweep.kappa[i] == Catch::Approx(firstAbove).epsilon(1e-10));
  }
}
