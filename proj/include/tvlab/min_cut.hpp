#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tvlab/max_flow.hpp"
#include "tvlab/perimeter.hpp"

namespace tvlab {

// Exact discrete prescribed-curvature problem
//   minimize  Per(F) - integral_F g  =  h^{d-1} #(boundary faces) - h^d sum_F g
// over subsets of the grid, optionally sandwiched between two masks.
// Anisotropic perimeter only: that is the graph-representable one.
struct CutProblem {
  Grid grid;
  ScalarField g;
  PerimeterMode mode = PerimeterMode::anisotropic(Boundary::neumann);
  std::optional<IndicatorSet> subset_of;    // F must stay inside this mask
  std::optional<IndicatorSet> superset_of;  // F must contain this mask

  void validate() const {
    if (mode.disc != Discretization::anisotropic)
      throw std::invalid_argument("CutProblem: anisotropic mode is mandatory");
    if (g.grid != grid) throw std::invalid_argument("CutProblem: field grid mismatch");
    if (!g.all_finite()) throw std::invalid_argument("CutProblem: nonfinite unary term");
    if (subset_of && subset_of->grid != grid)
      throw std::invalid_argument("CutProblem: subset constraint grid mismatch");
    if (superset_of && superset_of->grid != grid)
      throw std::invalid_argument("CutProblem: superset constraint grid mismatch");
    if (subset_of && superset_of) {
      for (long i = 0; i < grid.cell_count(); ++i)
        if (superset_of->contains(i) && !subset_of->contains(i))
          throw std::invalid_argument("CutProblem: infeasible constraints (superset not inside subset)");
    }
  }
};

struct MinCutResult {
  IndicatorSet minimizer;  // the largest minimizer (max-flow canonical choice)
  double energy = 0.0;     // Per(F) - h^d sum_F g, evaluated directly on F
  double flow_value = 0.0;
  double cut_value = 0.0;  // cut of the returned set in the flow network
};

inline double set_energy(const IndicatorSet& f, const ScalarField& g, PerimeterMode mode) {
  double mass = 0.0;
  for (long i = 0; i < f.grid.cell_count(); ++i)
    if (f.contains(i)) mass += g[i];
  return perimeter(f, mode) - f.grid.cell_volume() * mass;
}

inline MinCutResult min_cut_geometric(const CutProblem& prob) {
  prob.validate();
  const Grid& grid = prob.grid;
  const long n = grid.cell_count();
  const double faceW = grid.face_area();
  const double cellW = grid.cell_volume();
  const Boundary boundary = prob.mode.boundary;

  // effective unary terms: b_i > 0 pulls cell i into F
  std::vector<double> b(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) b[i] = cellW * prob.g[i];
  if (boundary == Boundary::dirichlet) {
    // outer faces cost face weight when the cell belongs to F
    for_each_face(
        grid, boundary, [](long, long) {}, [&](long a) { b[a] -= faceW; });
  }

  double scale = 0.0;
  for (long i = 0; i < n; ++i) scale += std::abs(b[i]);
  long faceCount = 0;
  for_each_face(grid, boundary, [&](long, long) { ++faceCount; });
  scale += faceW * static_cast<double>(faceCount);
  const double kForced = 2.0 * scale + 1.0;

  for (long i = 0; i < n; ++i) {
    if (prob.superset_of && prob.superset_of->contains(i)) b[i] = kForced;
    if (prob.subset_of && !prob.subset_of->contains(i)) b[i] = -kForced;
  }

  MaxFlow net(static_cast<int>(n) + 2);
  const int source = static_cast<int>(n), sink = static_cast<int>(n) + 1;
  for (long i = 0; i < n; ++i) {
    if (b[i] > 0.0)
      net.add_edge(source, static_cast<int>(i), b[i]);
    else if (b[i] < 0.0)
      net.add_edge(static_cast<int>(i), sink, -b[i]);
  }
  for_each_face(grid, boundary, [&](long a, long bb) {
    net.add_edge(static_cast<int>(a), static_cast<int>(bb), faceW, faceW);
  });

  MinCutResult out;
  out.flow_value = net.solve(source, sink);

  std::vector<char> sinkSide = net.sink_side();
  IndicatorSet f(grid);
  for (long i = 0; i < n; ++i) f.mask[i] = sinkSide[i] ? 0 : 1;

  // constraints must hold exactly by construction
  for (long i = 0; i < n; ++i) {
    if (prob.superset_of && prob.superset_of->contains(i) && !f.contains(i))
      throw std::runtime_error("min_cut_geometric: superset constraint violated");
    if (prob.subset_of && !prob.subset_of->contains(i) && f.contains(i))
      throw std::runtime_error("min_cut_geometric: subset constraint violated");
  }

  out.minimizer = f;
  out.energy = set_energy(f, prob.g, prob.mode);

  // cut audit: the cut of F in the network equals the max flow at optimality
  double cut = 0.0;
  for (long i = 0; i < n; ++i) {
    if (b[i] > 0.0 && !f.contains(i)) cut += b[i];
    if (b[i] < 0.0 && f.contains(i)) cut -= b[i];
  }
  for_each_face(grid, boundary, [&](long a, long bb) {
    if (f.contains(a) != f.contains(bb)) cut += faceW;
  });
  out.cut_value = cut;
  return out;
}

struct GridSweepResult {
  ScalarField kappa;      // lambda* h(x) at first containment; NaN when never active
  IndicatorSet assigned;
  std::vector<double> lambdas;
  std::vector<double> minimizer_volumes;
  double transition_lambda = std::numeric_limits<double>::infinity();
};

// Variational-curvature sweep on the grid: for increasing lambda, minimize
// Per(F) - lambda integral_F h among F inside E; minimizers are nested, and
// each new solve is constrained to contain the previous minimizer.
inline GridSweepResult lambda_sweep_grid(const Grid& grid, const IndicatorSet& e,
                                         const ScalarField& h_density,
                                         std::vector<double> lambda_grid,
                                         Boundary boundary = Boundary::neumann) {
  require_same_grid(grid, e.grid, "lambda_sweep_grid");
  require_same_grid(grid, h_density.grid, "lambda_sweep_grid");
  for (long i = 0; i < grid.cell_count(); ++i)
    if (!(h_density[i] > 0.0))
      throw std::invalid_argument("lambda_sweep_grid: density must be positive");
  if (lambda_grid.empty()) throw std::invalid_argument("lambda_sweep_grid: empty lambda grid");
  std::sort(lambda_grid.begin(), lambda_grid.end());
  if (!(lambda_grid.front() > 0.0))
    throw std::invalid_argument("lambda_sweep_grid: lambdas must be positive");

  GridSweepResult out;
  out.kappa = ScalarField(grid, std::numeric_limits<double>::quiet_NaN());
  out.assigned = IndicatorSet(grid);
  out.lambdas = lambda_grid;

  IndicatorSet prev(grid);
  bool havePrev = false;
  for (double lambda : lambda_grid) {
    CutProblem prob;
    prob.grid = grid;
    prob.mode = PerimeterMode::anisotropic(boundary);
    prob.g = h_density;
    for (auto& v : prob.g.values) v *= lambda;
    prob.subset_of = e;
    if (havePrev) prob.superset_of = prev;

    auto cut = min_cut_geometric(prob);
    const IndicatorSet& f = cut.minimizer;

    if (havePrev) {
      for (long i = 0; i < grid.cell_count(); ++i)
        if (prev.contains(i) && !f.contains(i))
          throw std::runtime_error("lambda_sweep_grid: nesting violated");
    }
    for (long i = 0; i < grid.cell_count(); ++i) {
      if (f.contains(i) && !out.assigned.contains(i)) {
        out.assigned.set(i, true);
        out.kappa[i] = lambda * h_density[i];
      }
    }
    if (!f.empty() && out.transition_lambda == std::numeric_limits<double>::infinity())
      out.transition_lambda = lambda;
    out.minimizer_volumes.push_back(f.volume());
    prev = f;
    havePrev = true;
  }
  return out;
}

}  // namespace tvlab
