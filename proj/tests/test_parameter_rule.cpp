#include <catch2/catch_amalgamated.hpp>

#include "tvlab/parameter_rule.hpp"

using namespace tvlab;

TEST_CASE("Hilbert reduction of the parameter choice rule") {
  // sigma = 2, delta(t) = t^2/2: the condition reduces to ||w|| ||A*||/alpha <= eta
  auto hilbert = ConvexityModulus::hilbert();

  SECTION("boundary case has zero margin") {
    auto r = parameter_choice_check(1.0, 1.0 / 3.0, 2.0, 1.0, 3.0, 2, hilbert);
    REQUIRE(r.ok);
    REQUIRE(r.margin == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(r.rhs == Catch::Approx(3.0));
  }
  SECTION("ok iff alpha >= 1/3") {
    REQUIRE(parameter_choice_check(1.0, 0.4, 2.0, 1.0, 3.0, 2, hilbert).ok);
    REQUIRE_FALSE(parameter_choice_check(1.0, 0.3, 2.0, 1.0, 3.0, 2, hilbert).ok);
  }
  SECTION("operator norm scales the threshold") {
    // ||w|| ||A*|| / alpha <= eta with ||A*|| = 2
    auto r = parameter_choice_check(1.0, 1.0, 2.0, 2.0, 3.0, 2, hilbert);
    REQUIRE(r.rhs == Catch::Approx(1.5));
    REQUIRE(r.ok);
  }
}

TEST_CASE("zero noise passes for every alpha") {
  auto hilbert = ConvexityModulus::hilbert();
  for (double alpha : {1e-6, 1e-3, 1.0, 50.0}) {
    auto r = parameter_choice_check(0.0, alpha, 2.0, 1.0, 2.0, 3, hilbert);
    REQUIRE(r.ok);
    REQUIRE(r.margin > 0.0);
  }
}

TEST_CASE("eta must stay below the isoperimetric constant") {
  auto hilbert = ConvexityModulus::hilbert();
  REQUIRE_THROWS_AS(parameter_choice_check(1.0, 1.0, 2.0, 1.0, 4.0, 2, hilbert),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(parameter_choice_check(1.0, 1.0, 2.0, 1.0, -1.0, 2, hilbert),
                    std::invalid_argument);
  // Theta_3 ~ 4.836 > 4.0, so the same eta is fine in 3-D
  REQUIRE_NOTHROW(parameter_choice_check(1.0, 1.0, 2.0, 1.0, 4.0, 3, hilbert));
}

TEST_CASE("general sigma uses the modulus at eta/||A*||") {
  // power modulus delta(t) = c t^tau: rhs = 2 (a/eta) c (eta/a)^tau
  double c = 1.0 / 6.0, tau = 3.0, a = 2.0, eta = 3.0, sigma = 1.5;
  auto m = ConvexityModulus::power(c, tau);
  auto r = parameter_choice_check(0.1, 0.5, sigma, a, eta, 3, m);
  double expectRhs = 2.0 * (a / eta) * c * std::pow(eta / a, tau);
  REQUIRE(r.rhs == Catch::Approx(expectRhs).epsilon(1e-12));
  REQUIRE(r.lhs == Catch::Approx(0.1 / std::pow(0.5, 2.0)).epsilon(1e-12));
}
