#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "tvlab/duality.hpp"

namespace tvlab {

// Modulus of uniform convexity delta(t): nondecreasing, delta(0) = 0.
// Either analytic (C t^tau) or a sampled lower envelope with log-log
// interpolation between knots and power extrapolation below the first knot.
class ConvexityModulus {
 public:
  static ConvexityModulus hilbert() { return power(0.5, 2.0); }

  static ConvexityModulus power(double c, double tau) {
    if (!(c > 0.0) || !(tau >= 1.0)) throw std::invalid_argument("ConvexityModulus: bad power");
    ConvexityModulus m;
    m.c_ = c;
    m.tau_ = tau;
    m.sampled_ = false;
    return m;
  }

  static ConvexityModulus sampled(std::vector<double> t, std::vector<double> delta) {
    if (t.size() != delta.size() || t.size() < 2)
      throw std::invalid_argument("ConvexityModulus: need >= 2 sample knots");
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (!(t[i] > 0.0) || !(delta[i] >= 0.0))
        throw std::invalid_argument("ConvexityModulus: bad knot");
      if (i > 0 && !(t[i] > t[i - 1]))
        throw std::invalid_argument("ConvexityModulus: knots must increase");
    }
    // monotone rectification: delta_i <- min_{j >= i} delta_j keeps the
    // envelope a valid (conservative) lower bound and nondecreasing
    for (std::size_t i = t.size() - 1; i-- > 0;) delta[i] = std::min(delta[i], delta[i + 1]);

    ConvexityModulus m;
    m.sampled_ = true;
    m.t_ = std::move(t);
    m.delta_ = std::move(delta);
    m.fit_power();
    return m;
  }

  double operator()(double t) const {
    if (!(t >= 0.0)) throw std::invalid_argument("ConvexityModulus: t must be >= 0");
    if (t == 0.0) return 0.0;
    if (!sampled_) return c_ * std::pow(t, tau_);
    if (t <= t_.front()) {
      // power extrapolation anchored at the first knot
      if (delta_.front() == 0.0) return 0.0;
      return delta_.front() * std::pow(t / t_.front(), tau_);
    }
    if (t > t_.back() * (1.0 + 1e-12))
      throw std::out_of_range("ConvexityModulus: t=" + std::to_string(t) +
                              " beyond sampled range [0, " + std::to_string(t_.back()) + "]");
    if (t >= t_.back()) return delta_.back();
    auto it = std::upper_bound(t_.begin(), t_.end(), t);
    std::size_t j = static_cast<std::size_t>(it - t_.begin());
    double t0 = t_[j - 1], t1 = t_[j], d0 = delta_[j - 1], d1 = delta_[j];
    if (d0 <= 0.0 || d1 <= 0.0) {  // linear in the degenerate case
      return d0 + (d1 - d0) * (t - t0) / (t1 - t0);
    }
    double lt = (std::log(t) - std::log(t0)) / (std::log(t1) - std::log(t0));
    return std::exp(std::log(d0) + lt * (std::log(d1) - std::log(d0)));
  }

  double power_type() const { return tau_; }
  double power_constant() const { return c_; }
  bool is_sampled() const { return sampled_; }
  double max_argument() const {
    return sampled_ ? t_.back() : std::numeric_limits<double>::infinity();
  }

 private:
  void fit_power() {
    // log-log least squares over positive knots
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < t_.size(); ++i) {
      if (delta_[i] <= 0.0) continue;
      double x = std::log(t_[i]), y = std::log(delta_[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++n;
    }
    if (n >= 2 && sxx * n - sx * sx > 0) {
      tau_ = (n * sxy - sx * sy) / (n * sxx - sx * sx);
      c_ = std::exp((sy - tau_ * sx) / n);
    } else {
      tau_ = 2.0;
      c_ = delta_.back() / (t_.back() * t_.back());
    }
  }

  bool sampled_ = false;
  double c_ = 0.5, tau_ = 2.0;
  std::vector<double> t_, delta_;
};

struct ModulusEstimate {
  ConvexityModulus modulus;
  bool stable = true;  // false when the sampling budget left the envelope moving
};

// Sampled lower envelope of the modulus of uniform convexity of a convex
// functional phi, from midpoint gaps:
//   phi((f+g)/2) <= phi(f)/2 + phi(g)/2 - (1/4) delta(||f-g||),
// so delta_hat(t) = 4 * min over pairs at distance t of the midpoint gap.
// Random pairs (including antipodal pairs through the origin, which are
// extremal for norm powers) are polished by local random search.
template <typename Phi>
ModulusEstimate estimate_modulus(const PNormSpace& space, Phi&& phi,
                                 const std::vector<double>& t_grid, int samples,
                                 std::uint64_t seed = 20240901) {
  if (t_grid.empty() || samples < 8) throw std::invalid_argument("estimate_modulus: bad budget");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::size_t n = space.size();

  auto random_dir = [&](double target_norm) {
    Vec u(n);
    for (auto& v : u) v = gauss(rng);
    double nn = space.norm(u);
    if (nn == 0.0) u[0] = 1.0, nn = space.norm(u);
    for (auto& v : u) v *= target_norm / nn;
    return u;
  };

  auto midpoint_gap = [&](const Vec& center, const Vec& halfstep) {
    Vec f(n), g(n);
    for (std::size_t i = 0; i < n; ++i) {
      f[i] = center[i] - halfstep[i];
      g[i] = center[i] + halfstep[i];
    }
    return 0.5 * phi(f) + 0.5 * phi(g) - phi(center);
  };

  std::vector<double> knots, values;
  bool stable = true;
  for (double t : t_grid) {
    if (!(t > 0.0)) throw std::invalid_argument("estimate_modulus: t grid must be positive");
    Vec bestCenter(n, 0.0), bestHalf = random_dir(0.5 * t);
    double best = midpoint_gap(bestCenter, bestHalf);

    for (int s = 0; s < samples; ++s) {
      Vec center(n, 0.0);
      if (s % 3 != 0) {  // two thirds off-origin, log-uniform scale
        double scale = std::exp(std::log(0.05) + unif(rng) * (std::log(4.0) - std::log(0.05)));
        center = random_dir(scale * t);
      }
      Vec half = random_dir(0.5 * t);
      double gap = midpoint_gap(center, half);
      if (gap < best) {
        best = gap;
        bestCenter = center;
        bestHalf = half;
      }
    }

    // local polish, shrinking random perturbations that keep ||f-g|| = t
    double stepc = 0.3 * t, lastPhaseImprovement = 0.0;
    for (int phase = 0; phase < 6; ++phase) {
      double phaseStart = best;
      for (int it = 0; it < samples / 2; ++it) {
        Vec center(n), half(n);
        for (std::size_t i = 0; i < n; ++i) {
          center[i] = bestCenter[i] + stepc * gauss(rng);
          half[i] = bestHalf[i] + stepc * gauss(rng);
        }
        double hn = space.norm(half);
        if (hn == 0.0) continue;
        for (auto& v : half) v *= 0.5 * t / hn;
        double gap = midpoint_gap(center, half);
        if (gap < best) {
          best = gap;
          bestCenter = center;
          bestHalf = half;
        }
      }
      lastPhaseImprovement = (phaseStart - best) / std::max(1e-300, std::abs(phaseStart));
      stepc *= 0.4;
    }
    if (lastPhaseImprovement > 0.02) stable = false;

    knots.push_back(t);
    values.push_back(std::max(0.0, 4.0 * best));
  }

  return {ConvexityModulus::sampled(std::move(knots), std::move(values)), stable};
}

// Convenience: modulus of phi = ||.||^{sigma'}/sigma' on the given space.
inline ModulusEstimate estimate_norm_power_modulus(const PNormSpace& space, double sigmaPrime,
                                                   const std::vector<double>& t_grid, int samples,
                                                   std::uint64_t seed = 20240901) {
  auto phi = [&space, sigmaPrime](const Vec& x) {
    return std::pow(space.norm(x), sigmaPrime) / sigmaPrime;
  };
  return estimate_modulus(space, phi, t_grid, samples, seed);
}

// <v_f - v_g, f - g> - 2 delta(||f-g||) with subgradients of
// phi = ||.||^{sigma'}/sigma' taken through the scaled duality map.
// Nonnegative (up to envelope error) for any valid modulus of phi.
inline double monotonicity_gap(const PNormSpace& space, double sigmaPrime, const Vec& f,
                               const Vec& g, const ConvexityModulus& delta) {
  Vec vf = norm_power_subgradient(space, f, sigmaPrime);
  Vec vg = norm_power_subgradient(space, g, sigmaPrime);
  Vec df(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) df[i] = f[i] - g[i];
  Vec dv(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) dv[i] = vf[i] - vg[i];
  return space.pairing(df, dv) - 2.0 * delta(space.norm(df));
}

// rho(s): inverse of t -> delta(t)/t, by bisection to 1e-10. rho(0) = 0.
inline double rho_stability(const ConvexityModulus& delta, double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("rho_stability: s must be >= 0");
  if (s == 0.0) return 0.0;

  auto ratio = [&](double t) { return delta(t) / t; };

  double hi = delta.is_sampled() ? delta.max_argument() : 1.0;
  if (!delta.is_sampled()) {
    while (ratio(hi) < s && hi < 1e12) hi *= 2.0;
  }
  if (ratio(hi) < s)
    throw std::out_of_range("rho_stability: s=" + std::to_string(s) +
                            " above sampled range, max ratio=" + std::to_string(ratio(hi)));
  double lo = hi;
  while (lo > 1e-300 && ratio(lo) > s) lo *= 0.5;

  for (int it = 0; it < 300; ++it) {
    double mid = 0.5 * (lo + hi);
    if (ratio(mid) < s)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-14 * hi) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace tvlab
