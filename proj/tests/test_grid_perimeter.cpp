#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "tvlab/geometry.hpp"
#include "tvlab/grid.hpp"
#include "tvlab/perimeter.hpp"

using namespace tvlab;

namespace {

// Independent face-count oracle: walks multi-indices directly instead of the
// library's line iterator.
double brute_force_perimeter(const IndicatorSet& e, Boundary boundary) {
  const Grid& g = e.grid;
  const int d = g.dim();
  long faces = 0;
  for (long i = 0; i < g.cell_count(); ++i) {
    auto mi = g.multi_index(i);
    for (int k = 0; k < d; ++k) {
      // face toward +e_k
      if (mi[k] + 1 < g.extent(k)) {
        auto mj = mi;
        mj[k] += 1;
        if (e.contains(i) != e.contains(g.index_of(mj))) ++faces;
      } else {
        if (boundary == Boundary::periodic && g.extent(k) >= 2) {
          auto mj = mi;
          mj[k] = 0;
          if (e.contains(i) != e.contains(g.index_of(mj))) ++faces;
        } else if (boundary == Boundary::dirichlet) {
          if (e.contains(i)) ++faces;
        }
      }
      // low-side ghost face only exists for dirichlet
      if (mi[k] == 0 && boundary == Boundary::dirichlet && e.contains(i)) ++faces;
    }
  }
  return g.face_area() * static_cast<double>(faces);
}

IndicatorSet random_set(const Grid& g, std::mt19937& rng, double p = 0.5) {
  std::bernoulli_distribution coin(p);
  IndicatorSet e(g);
  for (long i = 0; i < g.cell_count(); ++i) e.set(i, coin(rng));
  return e;
}

ScalarField random_field(const Grid& g, std::mt19937& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  ScalarField u(g);
  for (auto& v : u.values) v = dist(rng);
  return u;
}

}  // namespace

TEST_CASE("grid index round trips and cell centers") {
  Grid g({4, 5, 3}, 0.25, {-1.0, 0.0, 2.0});
  REQUIRE(g.dim() == 3);
  REQUIRE(g.cell_count() == 60);
  REQUIRE(g.stride(2) == 1);
  REQUIRE(g.stride(1) == 3);
  REQUIRE(g.stride(0) == 15);
  for (long i = 0; i < g.cell_count(); ++i) REQUIRE(g.index_of(g.multi_index(i)) == i);
  auto x = g.cell_center(g.index_of({1, 2, 1}));
  REQUIRE(x[0] == Catch::Approx(-0.75));
  REQUIRE(x[1] == Catch::Approx(0.5));
  REQUIRE(x[2] == Catch::Approx(2.25));
  REQUIRE_THROWS_AS(Grid({0, 2}, 1.0, {0.0, 0.0}), std::invalid_argument);
  REQUIRE_THROWS_AS(Grid({2, 2}, -1.0, {0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("grid box factory covers the requested extent") {
  Grid g = Grid::box({-2.0, -2.0}, {2.0, 2.0}, 1.0 / 32);
  REQUIRE(g.extent(0) == 128);
  REQUIRE(g.extent(1) == 128);
  REQUIRE(g.origin()[0] == Catch::Approx(-2.0 + 0.5 / 32));
}

TEST_CASE("perimeter of the empty set is zero in every mode") {
  Grid g({8, 8}, 0.5, {0.0, 0.0});
  IndicatorSet e(g);
  for (auto b : {Boundary::dirichlet, Boundary::neumann, Boundary::periodic}) {
    REQUIRE(perimeter(e, PerimeterMode::anisotropic(b)) == 0.0);
    REQUIRE(perimeter(e, PerimeterMode::isotropic(b)) == 0.0);
  }
}

TEST_CASE("single interior cell has four faces in 2-D") {
  Grid g({5, 5}, 1.0, {0.0, 0.0});
  IndicatorSet e(g);
  e.set(g.index_of({2, 2}), true);
  REQUIRE(perimeter(e, PerimeterMode::anisotropic(Boundary::neumann)) == Catch::Approx(4.0));
}

TEST_CASE("dirichlet counts faces against the zero exterior") {
  Grid g({3, 3}, 1.0, {0.0, 0.0});
  IndicatorSet e(g);
  e.set(g.index_of({0, 0}), true);  // corner cell
  REQUIRE(perimeter(e, PerimeterMode::anisotropic(Boundary::neumann)) == Catch::Approx(2.0));
  REQUIRE(perimeter(e, PerimeterMode::anisotropic(Boundary::dirichlet)) == Catch::Approx(4.0));
  // full grid: neumann sees nothing, dirichlet sees the outer surface
  IndicatorSet full(g, true);
  REQUIRE(perimeter(full, PerimeterMode::anisotropic(Boundary::neumann)) == 0.0);
  REQUIRE(perimeter(full, PerimeterMode::anisotropic(Boundary::dirichlet)) == Catch::Approx(12.0));
  REQUIRE(perimeter(full, PerimeterMode::anisotropic(Boundary::periodic)) == 0.0);
}

TEST_CASE("digitized disc perimeter matches brute-force face enumeration") {
  const double h = 1.0;
  Grid g({40, 40}, h, {-19.5, -19.5});
  const double R = 16.0;
  IndicatorSet e = ball_indicator(g, {0.0, 0.0}, R);
  double per = perimeter(e, PerimeterMode::anisotropic(Boundary::neumann));
  REQUIRE(per == Catch::Approx(brute_force_perimeter(e, Boundary::neumann)));
  // l1 boundary length of a digitized disc: between the euclidean and l1 values
  REQUIRE(per >= 2 * M_PI * R - 8 * h);
  REQUIRE(per <= 8 * R + 8 * h);
}

TEST_CASE("perimeter equals brute force on random masks in all modes") {
  std::mt19937 rng(71);
  Grid g2({7, 9}, 0.5, {0.0, 0.0});
  Grid g3({4, 5, 3}, 1.0, {0.0, 0.0, 0.0});
  for (int trial = 0; trial < 25; ++trial) {
    for (auto b : {Boundary::dirichlet, Boundary::neumann, Boundary::periodic}) {
      IndicatorSet e2 = random_set(g2, rng);
      REQUIRE(perimeter(e2, PerimeterMode::anisotropic(b)) ==
              Catch::Approx(brute_force_perimeter(e2, b)));
      IndicatorSet e3 = random_set(g3, rng);
      REQUIRE(perimeter(e3, PerimeterMode::anisotropic(b)) ==
              Catch::Approx(brute_force_perimeter(e3, b)));
    }
  }
}

TEST_CASE("total variation of constants and scaled indicators") {
  Grid g({10, 10}, 0.25, {0.0, 0.0});
  ScalarField c(g, 0.7);
  REQUIRE(total_variation(c, PerimeterMode::anisotropic(Boundary::neumann)) == 0.0);
  REQUIRE(total_variation(c, PerimeterMode::isotropic(Boundary::periodic)) == 0.0);

  std::mt19937 rng(5);
  IndicatorSet e = random_set(g, rng, 0.4);
  for (auto b : {Boundary::dirichlet, Boundary::neumann, Boundary::periodic}) {
    for (auto mode : {PerimeterMode::anisotropic(b), PerimeterMode::isotropic(b)}) {
      ScalarField u = e.to_field();
      for (auto& v : u.values) v *= 2.5;
      REQUIRE(total_variation(u, mode) == Catch::Approx(2.5 * perimeter(e, mode)).margin(1e-12));
    }
  }
}

TEST_CASE("coarea identity is exact for anisotropic TV") {
  Grid g({16, 16}, 0.5, {0.0, 0.0});
  std::mt19937 rng(12345);

  SECTION("indicator field") {
    IndicatorSet e = random_set(g, rng);
    auto r = coarea_check(e.to_field(), Boundary::neumann);
    REQUIRE(r.gap <= 1e-12 * (1.0 + r.tv));
  }

  SECTION("two nested levels") {
    ScalarField u(g, 0.0);
    IndicatorSet inner = ball_indicator(g, {4.0, 4.0}, 1.6);
    IndicatorSet outer = ball_indicator(g, {4.0, 4.0}, 3.1);
    for (long i = 0; i < g.cell_count(); ++i)
      u[i] = inner.contains(i) ? 2.0 : (outer.contains(i) ? 1.0 : 0.0);
    auto r = coarea_check(u, Boundary::neumann);
    REQUIRE(r.gap <= 1e-12 * (1.0 + r.tv));
  }

  SECTION("random fields, all boundary modes, signed values") {
    for (auto b : {Boundary::dirichlet, Boundary::neumann, Boundary::periodic}) {
      for (int trial = 0; trial < 20; ++trial) {
        ScalarField u = random_field(g, rng);
        auto r = coarea_check(u, b);
        REQUIRE(r.gap <= 1e-10 * (1.0 + r.tv));
      }
    }
  }
}

TEST_CASE("level sets use strict inequality") {
  Grid g({6, 6}, 1.0, {0.0, 0.0});
  ScalarField z(g, 0.0);
  REQUIRE(level_set(z, 0.0).empty());

  IndicatorSet b = ball_indicator(g, {2.0, 2.0}, 1.5);
  REQUIRE(level_set(b.to_field(), 0.5) == b);

  // two bumps, threshold between the coefficients picks the taller one
  IndicatorSet b1 = ball_indicator(g, {1.0, 1.0}, 0.6);
  IndicatorSet b2 = ball_indicator(g, {4.0, 4.0}, 0.6);
  ScalarField u(g, 0.0);
  for (long i = 0; i < g.cell_count(); ++i)
    u[i] = 2.0 * (b1.contains(i) ? 1 : 0) + 0.8 * (b2.contains(i) ? 1 : 0);
  REQUIRE(level_set(u, 1.2) == b1);
}

TEST_CASE("symmetric difference volume") {
  Grid g({12, 12}, 0.25, {0.0, 0.0});
  std::mt19937 rng(9);
  IndicatorSet e = random_set(g, rng), f = random_set(g, rng);
  REQUIRE(symmetric_difference_volume(e, e) == 0.0);
  IndicatorSet empty(g);
  REQUIRE(symmetric_difference_volume(empty, f) == Catch::Approx(f.volume()));
  // direct xor count oracle
  long xorCount = 0;
  for (long i = 0; i < g.cell_count(); ++i) xorCount += (e.contains(i) != f.contains(i));
  REQUIRE(symmetric_difference_volume(e, f) ==
          Catch::Approx(g.cell_volume() * static_cast<double>(xorCount)));
  Grid other({12, 12}, 0.5, {0.0, 0.0});
  REQUIRE_THROWS_AS(symmetric_difference_volume(e, IndicatorSet(other)), std::invalid_argument);
}

TEST_CASE("complement duality for neumann and periodic perimeters") {
  Grid g({9, 7}, 1.0, {0.0, 0.0});
  std::mt19937 rng(33);
  for (int trial = 0; trial < 50; ++trial) {
    IndicatorSet e = random_set(g, rng);
    for (auto b : {Boundary::neumann, Boundary::periodic}) {
      PerimeterMode m = PerimeterMode::anisotropic(b);
      REQUIRE(perimeter(e, m) == Catch::Approx(perimeter(e.complement(), m)));
    }
  }
}

TEST_CASE("submodularity of the anisotropic perimeter") {
  Grid g({8, 8}, 0.5, {0.0, 0.0});
  std::mt19937 rng(2024);
  PerimeterMode m = PerimeterMode::anisotropic(Boundary::neumann);
  for (int trial = 0; trial < 1000; ++trial) {
    IndicatorSet e = random_set(g, rng), f = random_set(g, rng);
    double lhs = perimeter(set_intersection(e, f), m) + perimeter(set_union(e, f), m);
    double rhs = perimeter(e, m) + perimeter(f, m);
    REQUIRE(lhs <= rhs + 1e-12);
  }
}

TEST_CASE("ball indicator digitization") {
  SECTION("tiny radius captures exactly the center cell") {
    Grid g({11, 11}, 1.0, {-5.0, -5.0});
    IndicatorSet e = ball_indicator(g, {0.0, 0.0}, 0.4);
    REQUIRE(e.cardinality() == 1);
    REQUIRE(e.contains(g.index_of({5, 5})));
  }
  SECTION("digitized area approximates pi r^2") {
    const double h = 1.0 / 32, r = 1.0;
    Grid g = Grid::box({-1.5, -1.5}, {1.5, 1.5}, h);
    IndicatorSet e = ball_indicator(g, {0.0, 0.0}, r);
    REQUIRE(std::abs(e.volume() - M_PI * r * r) <= 10 * h * r);
  }
  SECTION("center far outside the grid gives the empty set") {
    Grid g({8, 8}, 1.0, {0.0, 0.0});
    REQUIRE(ball_indicator(g, {100.0, 100.0}, 2.0).empty());
  }
  SECTION("invalid radius") {
    Grid g({8, 8}, 1.0, {0.0, 0.0});
    REQUIRE_THROWS_AS(ball_indicator(g, {0.0, 0.0}, 0.0), std::invalid_argument);
  }
}

TEST_CASE("isoperimetric constant") {
  REQUIRE(isoperimetric_constant(2) == Catch::Approx(2.0 * std::sqrt(M_PI)).epsilon(1e-14));
  REQUIRE(isoperimetric_constant(3) ==
          Catch::Approx(3.0 * std::pow(4.0 * M_PI / 3.0, 1.0 / 3.0)).epsilon(1e-14));
  for (int d : {2, 3, 4}) {
    double theta = isoperimetric_constant(d);
    double alt = std::pow(d, (d - 1.0) / d) * std::pow(unit_ball_perimeter(d), 1.0 / d);
    REQUIRE(std::abs(theta - alt) <= 1e-12 * theta);
  }
  REQUIRE_THROWS_AS(isoperimetric_constant(0), std::invalid_argument);
}

TEST_CASE("discrete isoperimetric ratio approaches Theta_2 for isotropic balls") {
  PerimeterMode iso = PerimeterMode::isotropic(Boundary::neumann);
  const double theta2 = isoperimetric_constant(2);

  // Binary center-sampled masks keep the staircase bias of one-sided
  // differences; the ratio stalls ~16% above Theta_2 at every resolution.
  // Cell-mean digitization removes the staircase and does converge.
  double binaryRatio = 0.0, coverageRatio = 0.0;
  for (long roh : {8L, 16L, 32L}) {
    const double h = 1.0 / static_cast<double>(roh);
    Grid g = Grid::box({-1.4, -1.4}, {1.4, 1.4}, h);
    IndicatorSet b = ball_indicator(g, {0.0, 0.0}, 1.0);
    binaryRatio = perimeter(b, iso) / std::sqrt(b.volume());
    ScalarField f = ball_coverage_field(g, {0.0, 0.0}, 1.0);
    double vol = 0.0;
    for (double v : f.values) vol += v;
    vol *= g.cell_volume();
    coverageRatio = total_variation(f, iso) / std::sqrt(vol);
  }
  REQUIRE(binaryRatio - theta2 >= 0.10 * theta2);
  REQUIRE(binaryRatio - theta2 <= 0.25 * theta2);
  REQUIRE(std::abs(coverageRatio - theta2) <= 0.10 * theta2);
}
