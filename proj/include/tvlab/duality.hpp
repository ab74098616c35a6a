#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace tvlab {

using Vec = std::vector<double>;

// Finite-dimensional weighted l^p space. The weights are quadrature weights
// (h^d for grid-sampled L^p); the pairing <v, g> = sum w_i v_i g_i is shared
// between a space and its dual, which carries the conjugate exponent and the
// same weights.
struct PNormSpace {
  double p = 2.0;
  Vec weights;

  static PNormSpace lp(double p, std::size_t n, double weight = 1.0) {
    if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("PNormSpace: p must be in (1,inf)");
    if (!(weight > 0.0)) throw std::invalid_argument("PNormSpace: weights must be positive");
    return {p, Vec(n, weight)};
  }

  static PNormSpace lp_weighted(double p, Vec w) {
    if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("PNormSpace: p must be in (1,inf)");
    for (double wi : w)
      if (!(wi > 0.0)) throw std::invalid_argument("PNormSpace: weights must be positive");
    return {p, std::move(w)};
  }

  std::size_t size() const { return weights.size(); }
  double dual_exponent() const { return p / (p - 1.0); }
  PNormSpace dual() const { return {dual_exponent(), weights}; }

  double norm(const Vec& x) const {
    check(x);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += weights[i] * std::pow(std::abs(x[i]), p);
    return std::pow(s, 1.0 / p);
  }

  double pairing(const Vec& v, const Vec& g) const {
    check(v);
    check(g);
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += weights[i] * v[i] * g[i];
    return s;
  }

  void check(const Vec& x) const {
    if (x.size() != weights.size()) throw std::invalid_argument("PNormSpace: dimension mismatch");
  }
};

inline void require_finite(const Vec& x, const char* who) {
  for (double v : x)
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(who) + ": nonfinite input");
}

// j(g) = subgradient of (1/2)||.||^2 at g, represented in the weighted
// pairing: j(g)_i = ||g||^{2-p} |g_i|^{p-1} sign(g_i). One-homogeneous,
// satisfies <j(g), g> = ||g||^2 and ||j(g)||_{p'} = ||g||_p; j(0) = 0.
inline Vec duality_map(const PNormSpace& space, const Vec& g) {
  require_finite(g, "duality_map");
  space.check(g);
  double n = space.norm(g);
  Vec out(g.size(), 0.0);
  if (n == 0.0) return out;
  double scale = std::pow(n, 2.0 - space.p);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double a = std::abs(g[i]);
    out[i] = (a == 0.0) ? 0.0 : scale * std::pow(a, space.p - 1.0) * (g[i] > 0 ? 1.0 : -1.0);
  }
  return out;
}

// Inverse of j is the duality mapping of the dual space.
inline Vec inverse_duality_map(const PNormSpace& space, const Vec& v) {
  require_finite(v, "inverse_duality_map");
  return duality_map(space.dual(), v);
}

// V(p, g) = (1/sigma')||p||^{sigma'}_{Y*} - <p, g> + (1/sigma)||g||^sigma_Y,
// nonnegative by Young's inequality when the two norms are dual.
inline double v_functional(const PNormSpace& dual_space, const Vec& p, const Vec& g,
                           double sigma) {
  if (!(sigma > 1.0)) throw std::invalid_argument("v_functional: sigma must be > 1");
  require_finite(p, "v_functional");
  require_finite(g, "v_functional");
  const double sigmaPrime = sigma / (sigma - 1.0);
  const PNormSpace primal = dual_space.dual();
  return std::pow(dual_space.norm(p), sigmaPrime) / sigmaPrime - dual_space.pairing(p, g) +
         std::pow(primal.norm(g), sigma) / sigma;
}

// Gradient of p -> V(p, g) in plain coordinates (used by the projection
// solver's descent; optimality is certified variationally, not by descent).
inline Vec v_functional_gradient(const PNormSpace& dual_space, const Vec& p, const Vec& g,
                                 double sigma) {
  const double sigmaPrime = sigma / (sigma - 1.0);
  const double pd = dual_space.p;
  double n = dual_space.norm(p);
  Vec grad(p.size());
  double scale = (n == 0.0) ? 0.0 : std::pow(n, sigmaPrime - pd);
  for (std::size_t i = 0; i < p.size(); ++i) {
    double a = std::abs(p[i]);
    double dnorm = (a == 0.0 || n == 0.0)
                       ? 0.0
                       : scale * std::pow(a, pd - 1.0) * (p[i] > 0 ? 1.0 : -1.0);
    grad[i] = dual_space.weights[i] * (dnorm - g[i]);
  }
  return grad;
}

// d(||.||^{sigma'}/sigma')(p) = ||p||^{sigma'-2} j^{-1}(p), an element of Y.
inline Vec norm_power_subgradient(const PNormSpace& dual_space, const Vec& p, double sigmaPrime) {
  double n = dual_space.norm(p);
  Vec j = duality_map(dual_space, p);
  if (n == 0.0) return j;  // zero vector
  double scale = std::pow(n, sigmaPrime - 2.0);
  for (auto& v : j) v *= scale;
  return j;
}

}  // namespace tvlab
