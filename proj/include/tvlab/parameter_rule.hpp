#pragma once

#include <cmath>
#include <stdexcept>

#include "tvlab/geometry.hpp"
#include "tvlab/modulus.hpp"

namespace tvlab {

struct ParameterChoiceResult {
  bool ok = false;
  double margin = 0.0;  // rhs - lhs
  double lhs = 0.0;     // ||w|| / alpha^{1/(sigma-1)}
  double rhs = 0.0;     // 2 (||A*||/eta) delta(eta/||A*||)
  double theta_d = 0.0;
};

// Parameter choice rule tying noise and regularization strength:
//   ||w|| / alpha^{1/(sigma-1)} <= 2 (||A*||/eta) delta(eta/||A*||),
// with eta below the isoperimetric constant Theta_d. In the Hilbert case
// (sigma = 2, delta(t) = t^2/2) the right side reduces to eta/||A*||.
inline ParameterChoiceResult parameter_choice_check(double w_norm, double alpha, double sigma,
                                                    double opnorm_adjoint, double eta, int d,
                                                    const ConvexityModulus& delta) {
  if (!(alpha > 0.0)) throw std::invalid_argument("parameter_choice_check: alpha must be > 0");
  if (!(sigma > 1.0)) throw std::invalid_argument("parameter_choice_check: sigma must be > 1");
  if (!(opnorm_adjoint > 0.0))
    throw std::invalid_argument("parameter_choice_check: operator norm must be > 0");
  if (!(w_norm >= 0.0)) throw std::invalid_argument("parameter_choice_check: bad noise norm");
  const double theta = isoperimetric_constant(d);
  if (!(eta > 0.0) || eta >= theta)
    throw std::invalid_argument("parameter_choice_check: eta must be below the isoperimetric constant");

  ParameterChoiceResult r;
  r.theta_d = theta;
  r.lhs = w_norm / std::pow(alpha, 1.0 / (sigma - 1.0));
  r.rhs = 2.0 * (opnorm_adjoint / eta) * delta(eta / opnorm_adjoint);
  r.margin = r.rhs - r.lhs;
  r.ok = r.lhs <= r.rhs;
  return r;
}

}  // namespace tvlab
