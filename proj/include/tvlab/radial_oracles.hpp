#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "tvlab/geometry.hpp"

namespace tvlab {

// Variational curvature of the ball B(0,R): d/R inside, -(d-1)/|x| outside.
inline double ball_curvature(int d, double R, double x_radius) {
  if (!(R > 0.0)) throw std::invalid_argument("ball_curvature: R must be positive");
  if (!(x_radius >= 0.0)) throw std::invalid_argument("ball_curvature: radius must be >= 0");
  if (x_radius < R) return static_cast<double>(d) / R;
  return -static_cast<double>(d - 1) / x_radius;
}

// Optimal curvature of the planar annulus A_{r1,r2}: constant
// 2(r1+r2)/(r2^2-r1^2) = 2/(r2-r1).
inline double annulus_curvature(double r1, double r2) {
  if (!(0.0 < r1 && r1 < r2)) throw std::invalid_argument("annulus_curvature: need 0 < r1 < r2");
  return 2.0 * (r1 + r2) / (r2 * r2 - r1 * r1);
}

// Plateau height of ROF denoising of c 1_{B(0,R)} under the fidelity
// convention (1/2)||u-f||^2_{L2} + alpha TV: the first-order condition gives
// b = (c - alpha d/R)^+.
inline double rof_ball_height(int d, double R, double c, double alpha) {
  if (!(R > 0.0 && c > 0.0 && alpha > 0.0))
    throw std::invalid_argument("rof_ball_height: parameters must be positive");
  return std::max(0.0, c - alpha * static_cast<double>(d) / R);
}

// Height as printed in the source example, (c - alpha d/(2R))^+; kept for
// side-by-side reporting. The fine-grid solver arbitrates between the two
// conventions (they differ by a factor 2 in the curvature term).
inline double rof_ball_height_variant(int d, double R, double c, double alpha) {
  if (!(R > 0.0 && c > 0.0 && alpha > 0.0))
    throw std::invalid_argument("rof_ball_height_variant: parameters must be positive");
  return std::max(0.0, c - alpha * static_cast<double>(d) / (2.0 * R));
}

// Two far-apart balls in R^3: f = c1 1_{B(0,r1)} + c2 1_{B(x0,r2)} with
// |x0| = separation. Solutions are plateaus on the two balls when the
// separation exceeds the minimal-surface constant D.
struct TwoBallConfig {
  double r1 = 1.0, r2 = 1.0;
  double separation = 3.0;
  double c1 = 1.0, c2 = 1.0;
  double alpha = 0.1;

  void validate() const {
    if (!(r1 > 0.0 && r2 > 0.0)) throw std::invalid_argument("TwoBallConfig: radii must be positive");
    if (!(c1 > 0.0 && c2 > 0.0)) throw std::invalid_argument("TwoBallConfig: heights must be positive");
    if (!(alpha > 0.0)) throw std::invalid_argument("TwoBallConfig: alpha must be positive");
    if (!(separation > r1 + r2))
      throw std::invalid_argument("TwoBallConfig: balls must be disjoint (separation <= r1 + r2)");
  }

  // D = 3 max(r1, r2); the known improvement to 2 max(r1, r2) justifies
  // accepting the boundary case separation == D (the canonical schedule
  // sits exactly there with r1 = 1, |x0| = 3).
  double separation_constant() const { return 3.0 * std::max(r1, r2); }
  bool strictly_separated() const { return separation > separation_constant(); }
};

struct TwoBallHeights {
  double b = 0.0, s = 0.0;              // first-order-condition values
  double b_variant = 0.0, s_variant = 0.0;  // source-example constants
};

inline TwoBallHeights rof_two_balls_solution(const TwoBallConfig& cfg) {
  cfg.validate();
  if (cfg.separation < cfg.separation_constant())
    throw std::invalid_argument("rof_two_balls_solution: far-apart hypothesis violated; oracle invalid");
  TwoBallHeights h;
  h.b = rof_ball_height(3, cfg.r1, cfg.c1, cfg.alpha);
  h.s = rof_ball_height(3, cfg.r2, cfg.c2, cfg.alpha);
  h.b_variant = rof_ball_height_variant(3, cfg.r1, cfg.c1, cfg.alpha);
  h.s_variant = rof_ball_height_variant(3, cfg.r2, cfg.c2, cfg.alpha);
  return h;
}

// Radially symmetric candidate set for the lambda-sweep curvature
// construction: a ball (any dimension) or a planar annulus.
struct RadialSet {
  enum class Kind { ball, annulus };
  Kind kind = Kind::ball;
  int dim = 2;
  double R = 1.0;        // ball radius
  double r1 = 0.0, r2 = 0.0;  // annulus radii

  static RadialSet ball(int d, double R) {
    if (!(R > 0.0) || d < 1) throw std::invalid_argument("RadialSet::ball: bad parameters");
    RadialSet s;
    s.kind = Kind::ball;
    s.dim = d;
    s.R = R;
    return s;
  }
  static RadialSet annulus(double r1, double r2) {
    if (!(0.0 < r1 && r1 < r2)) throw std::invalid_argument("RadialSet::annulus: bad radii");
    RadialSet s;
    s.kind = Kind::annulus;
    s.dim = 2;
    s.r1 = r1;
    s.r2 = r2;
    return s;
  }
};

namespace detail {

// cumulative integral of h(r) * surface(r) on [lo, hi] split into n panels,
// 5-point Gauss-Legendre per panel; cum[i] = integral over [lo, node_i]
inline std::vector<double> cumulative_weighted_volume(const std::function<double(double)>& h,
                                                      int d, double lo, double hi, int n) {
  static const double gx[5] = {-0.906179845938664, -0.538469310105683, 0.0,
                               0.538469310105683, 0.906179845938664};
  static const double gw[5] = {0.236926885056189, 0.478628670499366, 0.568888888888889,
                               0.478628670499366, 0.236926885056189};
  const double surfaceCoef = d * unit_ball_volume(d);
  std::vector<double> cum(n + 1, 0.0);
  double step = (hi - lo) / n;
  for (int i = 0; i < n; ++i) {
    double a = lo + i * step, b = a + step;
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int q = 0; q < 5; ++q) {
      double r = mid + half * gx[q];
      acc += gw[q] * h(r) * surfaceCoef * std::pow(r, d - 1);
    }
    cum[i + 1] = cum[i] + half * acc;
  }
  return cum;
}

struct RadialMinimizer {
  bool empty = true;
  double inner = 0.0, outer = 0.0;  // containing radial interval when nonempty
  double energy = 0.0;              // min energy (0 for the empty set)
};

// minimize Per(F) - lambda * integral_F h over the radial candidate family
inline RadialMinimizer minimize_radial(const RadialSet& set,
                                       const std::function<double(double)>& h, double lambda,
                                       int scan = 2048) {
  RadialMinimizer best;  // empty set, energy 0
  if (set.kind == RadialSet::Kind::ball) {
    const int d = set.dim;
    const double perCoef = d * unit_ball_volume(d);
    auto cum = cumulative_weighted_volume(h, d, 0.0, set.R, scan);
    for (int i = 1; i <= scan; ++i) {
      double rho = set.R * static_cast<double>(i) / scan;
      double energy = perCoef * std::pow(rho, d - 1) - lambda * cum[i];
      if (energy < best.energy) {
        best = {false, 0.0, rho, energy};
      }
    }
    return best;
  }
  // annulus, d = 2: candidates A_{ra, rb} with r1 <= ra <= rb <= r2
  auto cum = cumulative_weighted_volume(h, 2, set.r1, set.r2, scan);
  auto node = [&](int i) { return set.r1 + (set.r2 - set.r1) * static_cast<double>(i) / scan; };
  // the energy is linear in cum and separable in the two perimeter terms:
  // E(a, b) = 2 pi (r_a + r_b) - lambda (cum_b - cum_a); minimize the two
  // endpoints independently.
  int bestA = 0, bestB = scan;
  double bestAval = std::numeric_limits<double>::infinity();
  double bestBval = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= scan; ++i) {
    double aval = 2.0 * M_PI * node(i) + lambda * cum[i];
    if (aval < bestAval) {
      bestAval = aval;
      bestA = i;
    }
    double bval = 2.0 * M_PI * node(i) - lambda * cum[i];
    if (bval < bestBval) {
      bestBval = bval;
      bestB = i;
    }
  }
  if (bestA <= bestB) {
    double energy = bestAval + bestBval;
    if (energy < best.energy) best = {false, node(bestA), node(bestB), energy};
  } else {
    // optimal endpoints cross: evaluate the constrained diagonal a = b (empty)
    // and keep the empty set
  }
  return best;
}

}  // namespace detail

struct RadialSweepResult {
  std::vector<double> radii;
  std::vector<double> kappa;      // lambda* h(r); NaN where never activated
  std::vector<bool> assigned;
  double transition_lambda = std::numeric_limits<double>::infinity();
  bool any_assigned = false;
};

// lambda-sweep over a radially symmetric set: for each lambda in increasing
// order, the minimizer of Per(F) - lambda int_F h over the radial family is
// computed; kappa(r) = lambda* h(r) at first containment. Minimizers must be
// nested along the sweep.
inline RadialSweepResult lambda_sweep_radial(const RadialSet& set,
                                             const std::function<double(double)>& h_density,
                                             std::vector<double> lambda_grid,
                                             int radius_samples = 65) {
  if (lambda_grid.empty()) throw std::invalid_argument("lambda_sweep_radial: empty lambda grid");
  std::sort(lambda_grid.begin(), lambda_grid.end());
  if (!(lambda_grid.front() > 0.0))
    throw std::invalid_argument("lambda_sweep_radial: lambdas must be positive");

  const double lo = (set.kind == RadialSet::Kind::ball) ? 0.0 : set.r1;
  const double hi = (set.kind == RadialSet::Kind::ball) ? set.R : set.r2;

  RadialSweepResult out;
  out.radii.resize(radius_samples);
  out.kappa.assign(radius_samples, std::numeric_limits<double>::quiet_NaN());
  out.assigned.assign(radius_samples, false);
  for (int i = 0; i < radius_samples; ++i)
    out.radii[i] = lo + (hi - lo) * (i + 0.5) / radius_samples;

  bool havePrev = false;
  detail::RadialMinimizer prev;
  for (double lambda : lambda_grid) {
    auto m = detail::minimize_radial(set, h_density, lambda);
    if (!m.empty) {
      if (havePrev && !prev.empty) {
        // nesting up to scan resolution
        double tol = 2.0 * (hi - lo) / 2048;
        if (m.inner > prev.inner + tol || m.outer < prev.outer - tol)
          throw std::runtime_error("lambda_sweep_radial: nesting violated along the sweep");
      }
      if (out.transition_lambda == std::numeric_limits<double>::infinity())
        out.transition_lambda = lambda;
      for (int i = 0; i < radius_samples; ++i) {
        if (!out.assigned[i] && out.radii[i] >= m.inner && out.radii[i] <= m.outer) {
          out.assigned[i] = true;
          out.kappa[i] = lambda * h_density(out.radii[i]);
          out.any_assigned = true;
        }
      }
      prev = m;
      havePrev = true;
    }
  }
  return out;
}

// First lambda with a nonempty radial minimizer, located by bisection.
inline double radial_transition_lambda(const RadialSet& set,
                                       const std::function<double(double)>& h_density,
                                       double lambda_lo, double lambda_hi) {
  auto nonempty = [&](double l) { return !detail::minimize_radial(set, h_density, l).empty; };
  if (nonempty(lambda_lo)) return lambda_lo;
  if (!nonempty(lambda_hi))
    throw std::invalid_argument("radial_transition_lambda: no transition in the given bracket");
  double lo = lambda_lo, hi = lambda_hi;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (nonempty(mid))
      hi = mid;
    else
      lo = mid;
    if (hi - lo <= 1e-14 * hi) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace tvlab
