#pragma once

#include <cmath>
#include <vector>

#include "tvlab/perimeter.hpp"

namespace tvlab {

// Forward-difference gradient and its exact adjoint on a grid, axis-major
// layout: component k of cell i lives at z[k * n + i]. Top-edge components
// are identically zero under neumann boundaries; periodic wraps. (Dirichlet
// solves go through a zero-padded grid and use the neumann operators there.)
struct GradOps {
  Grid grid;
  Boundary boundary = Boundary::neumann;

  long cells() const { return grid.cell_count(); }
  long components() const { return grid.dim() * grid.cell_count(); }

  // operator norm bound: ||K|| <= 2 sqrt(d) / h
  double opnorm_bound() const {
    return 2.0 * std::sqrt(static_cast<double>(grid.dim())) / grid.spacing();
  }

  void apply(const std::vector<double>& u, std::vector<double>& z) const {
    const long n = cells();
    const double invh = 1.0 / grid.spacing();
    z.assign(static_cast<std::size_t>(components()), 0.0);
    for (int k = 0; k < grid.dim(); ++k) {
      double* zk = z.data() + static_cast<std::size_t>(k) * n;
      grid.for_each_line(k, [&](long base, long stride, long count) {
        for (long i = 0; i + 1 < count; ++i) {
          long a = base + i * stride;
          zk[a] = (u[a + stride] - u[a]) * invh;
        }
        long last = base + (count - 1) * stride;
        if (boundary == Boundary::periodic && count >= 2)
          zk[last] = (u[base] - u[last]) * invh;
        else
          zk[last] = 0.0;
      });
    }
  }

  // exact transpose: <apply(u), z> = <u, apply_transpose(z)> for all u, z
  void apply_transpose(const std::vector<double>& z, std::vector<double>& out) const {
    const long n = cells();
    const double invh = 1.0 / grid.spacing();
    out.assign(static_cast<std::size_t>(n), 0.0);
    for (int k = 0; k < grid.dim(); ++k) {
      const double* zk = z.data() + static_cast<std::size_t>(k) * n;
      grid.for_each_line(k, [&](long base, long stride, long count) {
        if (boundary == Boundary::periodic && count >= 2) {
          for (long i = 0; i < count; ++i) {
            long a = base + i * stride;
            long prev = base + ((i + count - 1) % count) * stride;
            out[a] += (zk[prev] - zk[a]) * invh;
          }
        } else {
          for (long i = 0; i < count; ++i) {
            long a = base + i * stride;
            double zprev = (i > 0) ? zk[a - stride] : 0.0;
            double zhere = (i + 1 < count) ? zk[a] : 0.0;
            out[a] += (zprev - zhere) * invh;
          }
        }
      });
    }
  }

  // Phi(z): l1 over components (anisotropic) or sum of per-cell euclidean
  // norms (isotropic); h^d * Phi(apply(u)) equals the discrete TV.
  double total_magnitude(const std::vector<double>& z, Discretization disc) const {
    const long n = cells();
    double acc = 0.0;
    if (disc == Discretization::anisotropic) {
      for (double v : z) acc += std::abs(v);
      return acc;
    }
    for (long i = 0; i < n; ++i) {
      double s = 0.0;
      for (int k = 0; k < grid.dim(); ++k) {
        double v = z[static_cast<std::size_t>(k) * n + i];
        s += v * v;
      }
      acc += std::sqrt(s);
    }
    return acc;
  }

  // projection of the dual variable onto the unit ball of the polar norm
  void project_dual_ball(std::vector<double>& z, Discretization disc) const {
    const long n = cells();
    if (disc == Discretization::anisotropic) {
      for (auto& v : z) v = std::min(1.0, std::max(-1.0, v));
      return;
    }
    for (long i = 0; i < n; ++i) {
      double s = 0.0;
      for (int k = 0; k < grid.dim(); ++k) {
        double v = z[static_cast<std::size_t>(k) * n + i];
        s += v * v;
      }
      if (s > 1.0) {
        double inv = 1.0 / std::sqrt(s);
        for (int k = 0; k < grid.dim(); ++k) z[static_cast<std::size_t>(k) * n + i] *= inv;
      }
    }
  }

  // largest per-cell (isotropic) or per-component (anisotropic) dual norm
  double dual_ball_excess(const std::vector<double>& z, Discretization disc) const {
    const long n = cells();
    double worst = 0.0;
    if (disc == Discretization::anisotropic) {
      for (double v : z) worst = std::max(worst, std::abs(v));
    } else {
      for (long i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = 0; k < grid.dim(); ++k) {
          double v = z[static_cast<std::size_t>(k) * n + i];
          s += v * v;
        }
        worst = std::max(worst, std::sqrt(s));
      }
    }
    return std::max(0.0, worst - 1.0);
  }
};

}  // namespace tvlab
