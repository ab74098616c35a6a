#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tvlab/grid.hpp"

namespace tvlab {

// Volume of the unit ball in R^d: pi^{d/2} / Gamma(d/2 + 1).
inline double unit_ball_volume(int d) {
  if (d < 1) throw std::invalid_argument("unit_ball_volume: d must be >= 1");
  return std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

inline double unit_ball_perimeter(int d) {
  // Per(B(0,1)) = d * |B(0,1)|
  return d * unit_ball_volume(d);
}

// Theta_d = Per(B)/|B|^{(d-1)/d} = d |B|^{1/d}, the sharp isoperimetric ratio.
inline double isoperimetric_constant(int d) {
  if (d < 1) throw std::invalid_argument("isoperimetric_constant: d must be >= 1");
  return d * std::pow(unit_ball_volume(d), 1.0 / d);
}

// Digitized ball: cell included iff its center is within distance r.
inline IndicatorSet ball_indicator(const Grid& g, const std::vector<double>& center, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("ball_indicator: r must be positive");
  if (static_cast<int>(center.size()) != g.dim())
    throw std::invalid_argument("ball_indicator: center dimension mismatch");
  IndicatorSet e(g);
  const long n = g.cell_count();
  const double r2 = r * r;
  for (long i = 0; i < n; ++i) {
    std::vector<double> x = g.cell_center(i);
    double d2 = 0.0;
    for (int k = 0; k < g.dim(); ++k) {
      double t = x[k] - center[k];
      d2 += t * t;
    }
    if (d2 <= r2) e.mask[i] = 1;
  }
  return e;
}

// Cell-coverage sampling of 1_{B(center,r)}: each cell gets the fraction of
// its volume inside the ball, estimated on a sub x ... x sub point lattice.
// This is the cell-mean digitization; binary center sampling keeps the full
// staircase bias of the discrete isotropic TV, coverage sampling does not.
inline ScalarField ball_coverage_field(const Grid& g, const std::vector<double>& center,
                                       double r, int sub = 4) {
  if (!(r > 0.0)) throw std::invalid_argument("ball_coverage_field: r must be positive");
  const int d = g.dim();
  ScalarField f(g);
  const double h = g.spacing();
  const double r2 = r * r;
  const long pts = static_cast<long>(std::pow(sub, d));
  for (long i = 0; i < g.cell_count(); ++i) {
    std::vector<double> x = g.cell_center(i);
    // quick accept/reject by center distance vs cell circumradius
    double d2 = 0.0;
    for (int k = 0; k < d; ++k) {
      double t = x[k] - center[k];
      d2 += t * t;
    }
    double circ = 0.5 * h * std::sqrt(static_cast<double>(d));
    double dist = std::sqrt(d2);
    if (dist + circ <= r) {
      f[i] = 1.0;
      continue;
    }
    if (dist - circ >= r) {
      f[i] = 0.0;
      continue;
    }
    long inside = 0;
    std::vector<long> sp(d, 0);
    for (long p = 0; p < pts; ++p) {
      double q2 = 0.0;
      for (int k = 0; k < d; ++k) {
        double off = (static_cast<double>(sp[k]) + 0.5) / sub - 0.5;
        double t = x[k] + off * h - center[k];
        q2 += t * t;
      }
      if (q2 <= r2) ++inside;
      for (int k = d - 1; k >= 0; --k) {
        if (++sp[k] < sub) break;
        sp[k] = 0;
      }
    }
    f[i] = static_cast<double>(inside) / static_cast<double>(pts);
  }
  return f;
}

inline IndicatorSet annulus_indicator(const Grid& g, const std::vector<double>& center,
                                      double r1, double r2) {
  if (!(0.0 < r1 && r1 < r2)) throw std::invalid_argument("annulus_indicator: need 0 < r1 < r2");
  IndicatorSet e(g);
  const long n = g.cell_count();
  for (long i = 0; i < n; ++i) {
    std::vector<double> x = g.cell_center(i);
    double d2 = 0.0;
    for (int k = 0; k < g.dim(); ++k) {
      double t = x[k] - center[k];
      d2 += t * t;
    }
    if (d2 > r1 * r1 && d2 <= r2 * r2) e.mask[i] = 1;
  }
  return e;
}

// Half-space {x . normal <= offset}, useful as a density-estimate reference.
inline IndicatorSet half_space_indicator(const Grid& g, const std::vector<double>& normal,
                                         double offset) {
  IndicatorSet e(g);
  const long n = g.cell_count();
  for (long i = 0; i < n; ++i) {
    std::vector<double> x = g.cell_center(i);
    double s = 0.0;
    for (int k = 0; k < g.dim(); ++k) s += x[k] * normal[k];
    if (s <= offset) e.mask[i] = 1;
  }
  return e;
}

}  // namespace tvlab
