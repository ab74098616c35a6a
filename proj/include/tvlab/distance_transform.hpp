#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "tvlab/grid.hpp"

namespace tvlab {

namespace detail {

// Large finite stand-in for "no seed yet"; keeps the parabola envelope
// arithmetic finite. Squared index distances are < 1e18 on any sane grid.
constexpr double kEdtBig = 1e30;

// 1-D exact squared distance transform via the lower envelope of parabolas.
inline void edt_line(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
                     std::vector<double>& z, long n) {
  int k = 0;
  v[0] = 0;
  z[0] = -kEdtBig;
  z[1] = kEdtBig;
  for (long q = 1; q < n; ++q) {
    double s = ((f[q] + static_cast<double>(q) * q) -
                (f[v[k]] + static_cast<double>(v[k]) * v[k])) /
               (2.0 * (q - v[k]));
    while (s <= z[k]) {
      --k;
      s = ((f[q] + static_cast<double>(q) * q) -
           (f[v[k]] + static_cast<double>(v[k]) * v[k])) /
          (2.0 * (q - v[k]));
    }
    ++k;
    v[k] = static_cast<int>(q);
    z[k] = s;
    z[k + 1] = kEdtBig;
  }
  k = 0;
  for (long q = 0; q < n; ++q) {
    while (z[k + 1] < static_cast<double>(q)) ++k;
    double dq = static_cast<double>(q) - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

}  // namespace detail

// Exact squared Euclidean distance (in index units) from every cell to the
// nearest cell of E, computed by a separable lower-envelope pass per axis.
// Cells unreachable from an empty E get +inf.
inline std::vector<double> squared_distance_transform(const IndicatorSet& e) {
  const Grid& g = e.grid;
  const long n = g.cell_count();
  std::vector<double> dist(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) dist[i] = e.mask[i] ? 0.0 : detail::kEdtBig;

  long maxext = 0;
  for (int k = 0; k < g.dim(); ++k) maxext = std::max(maxext, g.extent(k));
  std::vector<double> f(maxext), d(maxext), z(maxext + 1);
  std::vector<int> v(maxext);

  for (int k = 0; k < g.dim(); ++k) {
    g.for_each_line(k, [&](long base, long stride, long count) {
      for (long i = 0; i < count; ++i) f[i] = dist[base + i * stride];
      detail::edt_line(f, d, v, z, count);
      for (long i = 0; i < count; ++i) dist[base + i * stride] = d[i];
    });
  }
  for (long i = 0; i < n; ++i)
    if (dist[i] >= detail::kEdtBig) dist[i] = std::numeric_limits<double>::infinity();
  return dist;
}

// Hausdorff distance between cell-center point clouds of two masks on one
// grid. d_H(empty, empty) = 0; d_H(E, empty) = +inf for nonempty E.
inline double hausdorff_distance(const IndicatorSet& e, const IndicatorSet& f) {
  require_same_grid(e.grid, f.grid, "hausdorff_distance");
  const bool eEmpty = e.empty(), fEmpty = f.empty();
  if (eEmpty && fEmpty) return 0.0;
  if (eEmpty || fEmpty) return std::numeric_limits<double>::infinity();

  const long n = e.grid.cell_count();
  std::vector<double> dToF = squared_distance_transform(f);
  double m1 = 0.0;
  for (long i = 0; i < n; ++i)
    if (e.mask[i]) m1 = std::max(m1, dToF[i]);

  std::vector<double> dToE = squared_distance_transform(e);
  double m2 = 0.0;
  for (long i = 0; i < n; ++i)
    if (f.mask[i]) m2 = std::max(m2, dToE[i]);

  return e.grid.spacing() * std::sqrt(std::max(m1, m2));
}

}  // namespace tvlab
