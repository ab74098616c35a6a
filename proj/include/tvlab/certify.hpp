#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "tvlab/geometry.hpp"
#include "tvlab/min_cut.hpp"
#include "tvlab/perimeter.hpp"

namespace tvlab {

struct LevelSetMinimalityReport {
  std::vector<double> thresholds;
  std::vector<double> level_energies;  // energy of {u > s} under g = sign(s) v
  std::vector<double> min_energies;    // global minimum from the cut solver
  std::vector<double> violations;      // level_energy - min_energy (>= 0)
  double max_violation = 0.0;
};

// A certified subgradient pair (u, v) has almost every level-set {u > s}
// minimizing Per(E) - sign(s) integral_E v; the report measures how far each
// tested level-set is from the global minimum.
inline LevelSetMinimalityReport check_level_set_minimality(const ScalarField& u,
                                                           const ScalarField& v,
                                                           const std::vector<double>& thresholds,
                                                           Boundary boundary = Boundary::neumann) {
  require_same_grid(u.grid, v.grid, "check_level_set_minimality");
  LevelSetMinimalityReport rep;
  PerimeterMode mode = PerimeterMode::anisotropic(boundary);
  for (double s : thresholds) {
    const double sign = (s < 0.0) ? -1.0 : 1.0;
    CutProblem prob;
    prob.grid = u.grid;
    prob.mode = mode;
    prob.g = v;
    for (auto& x : prob.g.values) x *= sign;

    IndicatorSet e = level_set(u, s);
    double levelEnergy = set_energy(e, prob.g, mode);
    double minEnergy = min_cut_geometric(prob).energy;

    rep.thresholds.push_back(s);
    rep.level_energies.push_back(levelEnergy);
    rep.min_energies.push_back(minEnergy);
    rep.violations.push_back(levelEnergy - minEnergy);
    rep.max_violation = std::max(rep.max_violation, levelEnergy - minEnergy);
  }
  return rep;
}

// Discrete form of the ball comparison bound: for a minimizer E of
// Per(F) - integral_F v,
//   Per(E ∩ B) - integral_{E ∩ B} v  <=  2 Per(B; E)
// where Per(B; E) counts the faces that cross the ball boundary with both
// cells inside E. The identity
//   Per(E ∩ B) + Per(E \ B) - Per(E) = 2 (faces between E∩B and E\B)
// makes the discrete inequality exact for exact minimizers; the returned
// residual LHS - RHS is then <= the minimizer's energy suboptimality.
inline double compare_ball_residual(const IndicatorSet& e, const ScalarField& v,
                                    const std::vector<double>& center, double r,
                                    Boundary boundary = Boundary::neumann) {
  require_same_grid(e.grid, v.grid, "compare_ball_residual");
  PerimeterMode mode = PerimeterMode::anisotropic(boundary);
  IndicatorSet ball = ball_indicator(e.grid, center, r);
  IndicatorSet cap = set_intersection(e, ball);

  double lhs = set_energy(cap, v, mode);

  long crossing = 0;
  for_each_face(e.grid, boundary, [&](long a, long b) {
    if (e.contains(a) && e.contains(b) && ball.contains(a) != ball.contains(b)) ++crossing;
  });
  double rhs = 2.0 * e.grid.face_area() * static_cast<double>(crossing);
  return lhs - rhs;
}

// Cells of E with a missing 2d-neighbor inside the grid.
inline IndicatorSet discrete_boundary(const IndicatorSet& e) {
  IndicatorSet b(e.grid);
  for_each_face(e.grid, Boundary::neumann, [&](long x, long y) {
    if (e.contains(x) != e.contains(y)) {
      if (e.contains(x)) b.set(x, true);
      if (e.contains(y)) b.set(y, true);
    }
  });
  return b;
}

struct DensityProfileRow {
  double r = 0.0;
  double min_inner_fraction = 0.0;       // min over x in ∂E of |E ∩ B(x,r)| / |B(x,r)|
  double min_complement_fraction = 0.0;  // same with the complement of E
};

// Volume-fraction profile behind the uniform density estimates: for each
// radius, the worst fraction of E (and of its complement) in digitized balls
// centered on the discrete boundary of E.
inline std::vector<DensityProfileRow> density_estimate_profile(const IndicatorSet& e,
                                                               const std::vector<double>& radii) {
  const Grid& g = e.grid;
  IndicatorSet boundary = discrete_boundary(e);
  if (boundary.empty())
    throw std::invalid_argument("density_estimate_profile: set has empty discrete boundary");

  std::vector<long> boundaryCells;
  for (long i = 0; i < g.cell_count(); ++i)
    if (boundary.contains(i)) boundaryCells.push_back(i);

  std::vector<DensityProfileRow> rows;
  for (double r : radii) {
    if (!(r > 0.0)) throw std::invalid_argument("density_estimate_profile: radii must be positive");
    // ball stencil in index offsets
    const long reach = static_cast<long>(std::floor(r / g.spacing()));
    std::vector<std::vector<long>> offsets;
    std::vector<long> off(g.dim(), -reach);
    while (true) {
      double d2 = 0.0;
      for (int k = 0; k < g.dim(); ++k) d2 += static_cast<double>(off[k] * off[k]);
      if (std::sqrt(d2) * g.spacing() <= r) offsets.push_back(off);
      int k = g.dim() - 1;
      for (; k >= 0; --k) {
        if (++off[k] <= reach) break;
        off[k] = -reach;
      }
      if (k < 0) break;
    }

    DensityProfileRow row;
    row.r = r;
    row.min_inner_fraction = 1.0;
    row.min_complement_fraction = 1.0;
    for (long c : boundaryCells) {
      auto mi = g.multi_index(c);
      long total = 0, inside = 0;
      for (const auto& o : offsets) {
        bool ok = true;
        long lin = 0;
        for (int k = 0; k < g.dim(); ++k) {
          long q = mi[k] + o[k];
          if (q < 0 || q >= g.extent(k)) {
            ok = false;
            break;
          }
          lin += q * g.stride(k);
        }
        if (!ok) continue;  // clipped at the domain edge
        ++total;
        if (e.contains(lin)) ++inside;
      }
      if (total == 0) continue;
      double frac = static_cast<double>(inside) / static_cast<double>(total);
      row.min_inner_fraction = std::min(row.min_inner_fraction, frac);
      row.min_complement_fraction = std::min(row.min_complement_fraction, 1.0 - frac);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace tvlab
