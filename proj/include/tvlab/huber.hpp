#pragma once

#include <cmath>
#include <stdexcept>

namespace tvlab {

// Huber function of parameter 1/2.
inline double huber_psi(double t) {
  double a = std::abs(t);
  return a <= 0.5 ? 0.5 * a * a : 0.5 * (a - 0.25);
}

namespace detail {

// psi(x/l) + psi(y/l) - 1, strictly decreasing in l for (x,y) != 0.
inline double huber_level(double x, double y, double l) {
  return huber_psi(x / l) + huber_psi(y / l) - 1.0;
}

// boundary radius of C = {psi(x)+psi(y) <= 1} along direction (cs, sn)
inline double huber_boundary_radius(double cs, double sn) {
  double lo = 1e-9, hi = 4.0;  // boundary radii lie in [5/4*sqrt(2)/..., 9/4]
  auto f = [&](double r) { return huber_psi(r * cs) + huber_psi(r * sn) - 1.0; };
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (f(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

// Minkowski gauge of C = {psi(x) + psi(y) <= 1}: inf{l > 0 : (x/l, y/l) in C},
// found by monotone root-finding on l. Positively one-homogeneous; the
// boundary scaling along an axis solves psi(t) = 1, i.e. t = 9/4, so
// gauge(1, 0) = 4/9.
inline double huber_gauge_norm(double x, double y) {
  if (x == 0.0 && y == 0.0) return 0.0;
  if (!std::isfinite(x) || !std::isfinite(y))
    throw std::invalid_argument("huber_gauge_norm: nonfinite input");
  double hi = std::max(std::abs(x), std::abs(y));  // gauge <= |.|_inf / (9/4) * ... bracket below
  double lo = hi;
  while (detail::huber_level(x, y, hi) > 0.0) hi *= 2.0;
  while (detail::huber_level(x, y, lo) < 0.0) lo *= 0.5;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (detail::huber_level(x, y, mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Dual (polar) norm: support function sup{a u + b v : (u,v) in C}, by a
// dense scan over the boundary parametrization of C refined by golden
// section. The maximum over C of u is attained at (9/4, 0).
inline double huber_polar_norm(double a, double b) {
  if (a == 0.0 && b == 0.0) return 0.0;
  if (!std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument("huber_polar_norm: nonfinite input");

  auto support_at = [&](double theta) {
    double cs = std::cos(theta), sn = std::sin(theta);
    double r = detail::huber_boundary_radius(cs, sn);
    return a * r * cs + b * r * sn;
  };

  const int kScan = 1440;
  double bestTheta = 0.0, best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kScan; ++i) {
    double theta = 2.0 * M_PI * i / kScan;
    double s = support_at(theta);
    if (s > best) {
      best = s;
      bestTheta = theta;
    }
  }

  // golden-section polish around the scan winner
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = bestTheta - 2.0 * M_PI / kScan, hi = bestTheta + 2.0 * M_PI / kScan;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = support_at(x1), f2 = support_at(x2);
  for (int it = 0; it < 120; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = support_at(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = support_at(x1);
    }
  }
  return std::max(best, std::max(f1, f2));
}

}  // namespace tvlab
