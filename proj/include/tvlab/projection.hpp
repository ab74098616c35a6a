#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "tvlab/duality.hpp"

namespace tvlab {

// Closed convex K in the dual space, exposed through callbacks. The
// projection callback is the plain euclidean one; the generalized projection
// solver uses it for feasibility only and certifies optimality through the
// variational inequality afterwards.
struct ConvexSetOracle {
  std::function<Vec(const Vec&)> project;
  std::function<bool(const Vec&)> contains;
  std::function<Vec(std::mt19937_64&)> sample;  // optional, for certification

  static ConvexSetOracle box(Vec lo, Vec hi) {
    if (lo.size() != hi.size()) throw std::invalid_argument("ConvexSetOracle::box: bad bounds");
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (!(lo[i] <= hi[i])) throw std::invalid_argument("ConvexSetOracle::box: lo > hi");
    ConvexSetOracle k;
    k.project = [lo, hi](const Vec& x) {
      Vec y(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::min(hi[i], std::max(lo[i], x[i]));
      return y;
    };
    k.contains = [lo, hi](const Vec& x) {
      for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] < lo[i] - 1e-12 || x[i] > hi[i] + 1e-12) return false;
      return true;
    };
    k.sample = [lo, hi](std::mt19937_64& rng) {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      Vec x(lo.size());
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = lo[i] + u(rng) * (hi[i] - lo[i]);
      return x;
    };
    return k;
  }
};

struct ProjectionResult {
  Vec p;                  // pi_K(g)
  double value = 0.0;     // V(pi_K(g), g)
  double vi_residual = 0.0;  // min over sampled q of <pi-q, g - dphi(pi)>; >= -tol at optimum
  int iterations = 0;
  bool converged = false;
};

// Generalized projection pi_K(g) = argmin_{p in K} V(p, g), by projected
// gradient descent with backtracking on the convex objective. The descent
// path is not trusted: the variational-inequality residual against sampled
// members of K is the certificate.
inline ProjectionResult generalized_projection(const PNormSpace& dual_space,
                                               const ConvexSetOracle& K, const Vec& g,
                                               double sigma, double tol = 1e-11,
                                               int max_iter = 20000, int vi_samples = 100,
                                               std::uint64_t seed = 777) {
  if (!K.project) throw std::invalid_argument("generalized_projection: K has no projection");
  if (!(sigma > 1.0)) throw std::invalid_argument("generalized_projection: sigma must be > 1");
  require_finite(g, "generalized_projection");
  const double sigmaPrime = sigma / (sigma - 1.0);
  const PNormSpace primal = dual_space.dual();

  // start from the projected unconstrained minimizer p* = ||g||^{sigma-2} j(g)
  Vec pstar = duality_map(primal, g);
  double gn = primal.norm(g);
  if (gn > 0.0) {
    double scale = std::pow(gn, sigma - 2.0);
    for (auto& v : pstar) v *= scale;
  }
  Vec p = K.project(pstar);
  double value = v_functional(dual_space, p, g, sigma);

  double maxw = 0.0;
  for (double w : dual_space.weights) maxw = std::max(maxw, w);
  double step = 1.0 / maxw;

  int it = 0;
  bool converged = false;
  for (; it < max_iter; ++it) {
    Vec grad = v_functional_gradient(dual_space, p, g, sigma);
    bool accepted = false;
    Vec cand;
    double candValue = 0.0;
    for (int bt = 0; bt < 60; ++bt) {
      Vec trial(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) trial[i] = p[i] - step * grad[i];
      trial = K.project(trial);
      double tv = v_functional(dual_space, trial, g, sigma);
      if (tv <= value - 1e-16 * (1.0 + std::abs(value))) {
        cand = std::move(trial);
        candValue = tv;
        accepted = true;
        break;
      }
      step *= 0.5;
      if (step < 1e-18 / maxw) break;
    }
    if (!accepted) {
      converged = true;  // stationary within floating point
      break;
    }
    double move = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) move = std::max(move, std::abs(cand[i] - p[i]));
    double drop = value - candValue;
    p = std::move(cand);
    value = candValue;
    step *= 1.3;
    if (move <= tol * (1.0 + dual_space.norm(p)) && drop <= tol * tol * (1.0 + std::abs(value))) {
      converged = true;
      break;
    }
  }

  ProjectionResult r;
  r.p = p;
  r.value = value;
  r.iterations = it;
  r.converged = converged;

  // certificate: <pi - q, g - dphi(pi)> >= 0 for every q in K
  if (K.sample && vi_samples > 0) {
    std::mt19937_64 rng(seed);
    Vec dphi = norm_power_subgradient(dual_space, p, sigmaPrime);
    Vec rhs(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) rhs[i] = g[i] - dphi[i];
    double worst = std::numeric_limits<double>::infinity();
    for (int s = 0; s < vi_samples; ++s) {
      Vec q = K.sample(rng);
      Vec diff(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) diff[i] = p[i] - q[i];
      worst = std::min(worst, dual_space.pairing(diff, rhs));
    }
    r.vi_residual = worst;
  }

  if (!r.converged) {
    std::ostringstream ss;
    ss << "generalized_projection: no convergence in " << max_iter
       << " iterations, VI residual " << r.vi_residual;
    throw std::runtime_error(ss.str());
  }
  return r;
}

}  // namespace tvlab
