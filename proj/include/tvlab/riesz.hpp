#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "tvlab/radial_oracles.hpp"

namespace tvlab {

// Piecewise-constant radial density with bounded support: value values[i] on
// the ring (breaks[i-1], breaks[i]], zero beyond the last break.
struct RadialStepFunction {
  std::vector<double> breaks;
  std::vector<double> values;

  RadialStepFunction(std::vector<double> b, std::vector<double> v)
      : breaks(std::move(b)), values(std::move(v)) {
    if (breaks.empty() || breaks.size() != values.size())
      throw std::invalid_argument("RadialStepFunction: breaks/values mismatch");
    double prev = 0.0;
    for (double r : breaks) {
      if (!(r > prev)) throw std::invalid_argument("RadialStepFunction: breaks must increase from 0");
      prev = r;
    }
  }

  static RadialStepFunction annulus(double r1, double r2, double value) {
    return RadialStepFunction({r1, r2}, {0.0, value});
  }

  double support_radius() const { return breaks.back(); }

  double eval(double r) const {
    if (r < 0.0) throw std::invalid_argument("RadialStepFunction: negative radius");
    double prev = 0.0;
    for (std::size_t i = 0; i < breaks.size(); ++i) {
      if (r > prev && r <= breaks[i]) return values[i];
      prev = breaks[i];
    }
    if (r == 0.0) return values.front();
    return 0.0;
  }
};

struct QuadratureSpec {
  int n_r = 512;     // radial rings across the support
  int n_theta = 2048;
  double eps_cut = -1.0;  // singularity exclusion radius; < 0 means dr/2
};

struct RieszResult {
  double value = 0.0;
  double error_estimate = 0.0;  // |value - value at half resolution|
};

namespace detail {

inline double riesz_quadrature(const RadialStepFunction& dens, double x_radius, int n_r,
                               int n_theta, double eps_cut) {
  const double support = dens.support_radius();
  const double drTarget = support / n_r;
  const double eps = (eps_cut > 0.0) ? eps_cut : 0.5 * drTarget;
  const double dtheta = 2.0 * M_PI / n_theta;

  double acc = 0.0;
  double prev = 0.0;
  for (std::size_t seg = 0; seg < dens.breaks.size(); ++seg) {
    const double a = prev, b = dens.breaks[seg];
    prev = b;
    const double v = dens.values[seg];
    if (v == 0.0) continue;
    const int rings = std::max(2, static_cast<int>(std::ceil((b - a) / drTarget)));
    const double dr = (b - a) / rings;
    for (int i = 0; i < rings; ++i) {
      const double rc = a + (i + 0.5) * dr;
      const double w = v * rc * dr * dtheta;
      for (int j = 0; j < n_theta; ++j) {
        const double th = (j + 0.5) * dtheta;
        const double dx = rc * std::cos(th) - x_radius;
        const double dy = rc * std::sin(th);
        const double dist = std::sqrt(dx * dx + dy * dy);
        if (dist < eps) continue;  // covered by the analytic core below
        acc += w / dist;
      }
    }
  }
  // analytic integral of 1/|y| over the excluded disc, times local density
  acc += dens.eval(x_radius) * 2.0 * M_PI * eps;
  return acc;
}

}  // namespace detail

// I_1 u(x) = integral of u(y)/|x-y| dy over R^2 for a radial step density u,
// evaluated at |x| = x_radius (rotation invariant by construction). Polar
// midpoint quadrature aligned to the density's rings; the 1/|x-y|
// singularity is removed by a disc of radius eps_cut around x whose exact
// integral, 2 pi eps times the local density, is added back.
inline RieszResult riesz_potential_radial(const RadialStepFunction& dens, double x_radius,
                                          const QuadratureSpec& spec = {}) {
  if (!(x_radius >= 0.0)) throw std::invalid_argument("riesz_potential_radial: bad radius");
  if (spec.n_r < 4 || spec.n_theta < 8)
    throw std::invalid_argument("riesz_potential_radial: quadrature too coarse");
  RieszResult r;
  r.value = detail::riesz_quadrature(dens, x_radius, spec.n_r, spec.n_theta, spec.eps_cut);
  double coarse =
      detail::riesz_quadrature(dens, x_radius, spec.n_r / 2, spec.n_theta / 2,
                               spec.eps_cut > 0.0 ? spec.eps_cut : -1.0);
  r.error_estimate = std::abs(r.value - coarse);
  return r;
}

struct RadonMarginResult {
  long n = 0;
  double alpha = 0.0;
  double riesz_lower = 0.0;    // min over sampled x in A_n of (1/alpha) I_1 z_n
  double kappa_annulus = 0.0;  // 2/n
  double margin = 0.0;
  std::vector<double> sample_radii;
  std::vector<double> sample_values;  // (1/alpha) I_1 z_n at the samples
  double max_quadrature_error = 0.0;
};

// Quantities of the Radon-transform counterexample: density
// z_n = n^{-3/2-delta} on the annulus B(0,2n) \ B(0,n), regularization
// alpha_n = ell n^{-delta}. The lower bound (1/alpha_n) I_1 z_n scales like
// n^{-1/2} while the annulus curvature 2/n decays faster, so the margin
// turns positive for large n.
inline RadonMarginResult radon_counterexample_margin(long n, double delta, double ell,
                                                     const QuadratureSpec& spec = {},
                                                     int x_samples = 9) {
  if (n < 2) throw std::invalid_argument("radon_counterexample_margin: n must be >= 2");
  if (!(delta > 0.0 && delta < 0.5))
    throw std::invalid_argument("radon_counterexample_margin: delta must lie in (0, 1/2)");
  if (!(ell > 0.0)) throw std::invalid_argument("radon_counterexample_margin: ell must be positive");
  if (x_samples < 2) throw std::invalid_argument("radon_counterexample_margin: need >= 2 samples");

  const double nn = static_cast<double>(n);
  const double zval = std::pow(nn, -1.5 - delta);
  RadialStepFunction z = RadialStepFunction::annulus(nn, 2.0 * nn, zval);

  RadonMarginResult r;
  r.n = n;
  r.alpha = ell * std::pow(nn, -delta);
  r.kappa_annulus = annulus_curvature(nn, 2.0 * nn);

  double lower = std::numeric_limits<double>::infinity();
  for (int k = 0; k < x_samples; ++k) {
    double xr = nn * (1.0 + static_cast<double>(k) / (x_samples - 1));
    xr = std::min(xr, 2.0 * nn - 1e-9 * nn);  // keep strictly inside the ring
    xr = std::max(xr, nn + 1e-9 * nn);
    auto res = riesz_potential_radial(z, xr, spec);
    double val = res.value / r.alpha;
    r.sample_radii.push_back(xr);
    r.sample_values.push_back(val);
    r.max_quadrature_error = std::max(r.max_quadrature_error, res.error_estimate / r.alpha);
    lower = std::min(lower, val);
  }
  r.riesz_lower = lower;
  r.margin = r.riesz_lower - r.kappa_annulus;
  return r;
}

// Least-squares slope of log y against log x.
inline double fit_log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_log_log_slope: need >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw std::invalid_argument("fit_log_log_slope: values must be positive");
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace tvlab
