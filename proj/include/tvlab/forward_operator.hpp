#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

#include "tvlab/duality.hpp"

namespace tvlab {

// Linear measurement operator between euclidean coordinate vectors. The
// data-space quadrature weight lives in the problem spec, not here.
struct ForwardOperator {
  enum class Kind { identity, matrix, custom };

  Kind kind = Kind::identity;
  long domain_size = 0;
  long range_size = 0;
  std::vector<double> dense;  // row-major, range_size x domain_size
  std::function<void(const Vec&, Vec&)> apply_fn;
  std::function<void(const Vec&, Vec&)> adjoint_fn;
  double opnorm_bound = 1.0;  // >= euclidean operator norm

  static ForwardOperator identity(long n) {
    ForwardOperator op;
    op.kind = Kind::identity;
    op.domain_size = op.range_size = n;
    op.opnorm_bound = 1.0;
    return op;
  }

  static ForwardOperator matrix(long rows, long cols, std::vector<double> entries) {
    if (static_cast<long>(entries.size()) != rows * cols)
      throw std::invalid_argument("ForwardOperator::matrix: bad entry count");
    ForwardOperator op;
    op.kind = Kind::matrix;
    op.range_size = rows;
    op.domain_size = cols;
    op.dense = std::move(entries);
    op.opnorm_bound = 0.0;  // caller estimates, see power_iteration_opnorm
    return op;
  }

  static ForwardOperator custom(long rows, long cols, std::function<void(const Vec&, Vec&)> apply,
                                std::function<void(const Vec&, Vec&)> adjoint, double opnorm) {
    ForwardOperator op;
    op.kind = Kind::custom;
    op.range_size = rows;
    op.domain_size = cols;
    op.apply_fn = std::move(apply);
    op.adjoint_fn = std::move(adjoint);
    op.opnorm_bound = opnorm;
    return op;
  }

  void apply(const Vec& u, Vec& y) const {
    if (static_cast<long>(u.size()) != domain_size)
      throw std::invalid_argument("ForwardOperator::apply: domain size mismatch");
    y.assign(static_cast<std::size_t>(range_size), 0.0);
    switch (kind) {
      case Kind::identity:
        y = u;
        break;
      case Kind::matrix:
        for (long r = 0; r < range_size; ++r) {
          const double* row = dense.data() + r * domain_size;
          double acc = 0.0;
          for (long c = 0; c < domain_size; ++c) acc += row[c] * u[c];
          y[r] = acc;
        }
        break;
      case Kind::custom:
        apply_fn(u, y);
        break;
    }
  }

  void adjoint(const Vec& y, Vec& u) const {
    if (static_cast<long>(y.size()) != range_size)
      throw std::invalid_argument("ForwardOperator::adjoint: range size mismatch");
    u.assign(static_cast<std::size_t>(domain_size), 0.0);
    switch (kind) {
      case Kind::identity:
        u = y;
        break;
      case Kind::matrix:
        for (long r = 0; r < range_size; ++r) {
          const double* row = dense.data() + r * domain_size;
          for (long c = 0; c < domain_size; ++c) u[c] += row[c] * y[r];
        }
        break;
      case Kind::custom:
        adjoint_fn(y, u);
        break;
    }
  }
};

// Euclidean operator norm estimate by power iteration on A*A.
inline double power_iteration_opnorm(const ForwardOperator& op, int iters = 60,
                                     std::uint64_t seed = 2) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Vec u(static_cast<std::size_t>(op.domain_size));
  for (auto& x : u) x = gauss(rng);
  Vec y, back;
  double norm = 0.0;
  for (int it = 0; it < iters; ++it) {
    op.apply(u, y);
    op.adjoint(y, back);
    double nn = 0.0;
    for (double x : back) nn += x * x;
    nn = std::sqrt(nn);
    if (nn == 0.0) return 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = back[i] / nn;
    norm = std::sqrt(nn);
  }
  return norm;
}

// max over random pairs of |<Au, y> - <u, A*y>| / scale
inline double adjoint_consistency(const ForwardOperator& op, int trials = 100,
                                  std::uint64_t seed = 3) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  double worst = 0.0;
  Vec u(static_cast<std::size_t>(op.domain_size)), y(static_cast<std::size_t>(op.range_size));
  Vec au, aty;
  for (int t = 0; t < trials; ++t) {
    for (auto& x : u) x = gauss(rng);
    for (auto& x : y) x = gauss(rng);
    op.apply(u, au);
    op.adjoint(y, aty);
    double a = 0.0, b = 0.0, scale = 1.0;
    for (std::size_t i = 0; i < y.size(); ++i) a += au[i] * y[i];
    for (std::size_t i = 0; i < u.size(); ++i) b += u[i] * aty[i];
    for (std::size_t i = 0; i < y.size(); ++i) scale += std::abs(au[i] * y[i]);
    worst = std::max(worst, std::abs(a - b) / scale);
  }
  return worst;
}

}  // namespace tvlab
