#pragma once

#include <cstdint>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace tvlab {

// Axis-aligned d-dimensional cell lattice with uniform spacing.
// Cell centers sit at origin + spacing * multi_index, multi-indices are
// linearized row-major with the last axis fastest.
class Grid {
 public:
  Grid() = default;

  Grid(std::vector<long> shape, double spacing, std::vector<double> origin)
      : shape_(std::move(shape)), spacing_(spacing), origin_(std::move(origin)) {
    if (shape_.empty()) throw std::invalid_argument("Grid: dimension must be >= 1");
    if (origin_.size() != shape_.size())
      throw std::invalid_argument("Grid: origin/shape dimension mismatch");
    if (!(spacing_ > 0.0)) throw std::invalid_argument("Grid: spacing must be positive");
    for (long n : shape_)
      if (n < 1) throw std::invalid_argument("Grid: all extents must be >= 1");
    strides_.assign(shape_.size(), 1);
    for (int k = static_cast<int>(shape_.size()) - 2; k >= 0; --k)
      strides_[k] = strides_[k + 1] * shape_[k + 1];
    cells_ = strides_[0] * shape_[0];
  }

  // Convenience: cubic-ish box [lo, hi)^d sampled at cell centers lo + (i+1/2)h.
  static Grid box(const std::vector<double>& lo, const std::vector<double>& hi, double h) {
    if (lo.size() != hi.size()) throw std::invalid_argument("Grid::box: corner mismatch");
    std::vector<long> shape(lo.size());
    std::vector<double> origin(lo.size());
    for (std::size_t k = 0; k < lo.size(); ++k) {
      double len = hi[k] - lo[k];
      if (!(len > 0.0)) throw std::invalid_argument("Grid::box: empty box");
      shape[k] = static_cast<long>(std::llround(len / h));
      if (shape[k] < 1) shape[k] = 1;
      origin[k] = lo[k] + 0.5 * h;
    }
    return Grid(std::move(shape), h, std::move(origin));
  }

  int dim() const { return static_cast<int>(shape_.size()); }
  long cell_count() const { return cells_; }
  double spacing() const { return spacing_; }
  const std::vector<long>& shape() const { return shape_; }
  const std::vector<double>& origin() const { return origin_; }
  long stride(int axis) const { return strides_[axis]; }
  long extent(int axis) const { return shape_[axis]; }

  double cell_volume() const { return std::pow(spacing_, dim()); }
  double face_area() const { return std::pow(spacing_, dim() - 1); }

  long index_of(const std::vector<long>& mi) const {
    long lin = 0;
    for (int k = 0; k < dim(); ++k) lin += mi[k] * strides_[k];
    return lin;
  }

  std::vector<long> multi_index(long lin) const {
    std::vector<long> mi(dim());
    for (int k = 0; k < dim(); ++k) {
      mi[k] = lin / strides_[k];
      lin -= mi[k] * strides_[k];
    }
    return mi;
  }

  std::vector<double> cell_center(long lin) const {
    std::vector<long> mi = multi_index(lin);
    std::vector<double> x(dim());
    for (int k = 0; k < dim(); ++k) x[k] = origin_[k] + spacing_ * mi[k];
    return x;
  }

  bool same_layout(const Grid& o) const {
    return shape_ == o.shape_ && spacing_ == o.spacing_ && origin_ == o.origin_;
  }

  bool operator==(const Grid& o) const { return same_layout(o); }
  bool operator!=(const Grid& o) const { return !same_layout(o); }

  // Calls fn(base, stride, count) for every 1-D line of cells along `axis`.
  template <typename Fn>
  void for_each_line(int axis, Fn&& fn) const {
    const long count = shape_[axis];
    const long stride = strides_[axis];
    const long nlines = cells_ / count;
    // Enumerate line bases: all multi-indices with axis coordinate zero.
    std::vector<long> mi(dim(), 0);
    for (long line = 0; line < nlines; ++line) {
      long base = 0;
      for (int k = 0; k < dim(); ++k) base += mi[k] * strides_[k];
      fn(base, stride, count);
      // increment mi skipping `axis`
      for (int k = dim() - 1; k >= 0; --k) {
        if (k == axis) continue;
        if (++mi[k] < shape_[k]) break;
        mi[k] = 0;
      }
    }
  }

 private:
  std::vector<long> shape_;
  double spacing_ = 1.0;
  std::vector<double> origin_;
  std::vector<long> strides_;
  long cells_ = 0;
};

// Real values on a grid, one per cell.
struct ScalarField {
  Grid grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const Grid& g, double fill = 0.0)
      : grid(g), values(static_cast<std::size_t>(g.cell_count()), fill) {}
  ScalarField(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (static_cast<long>(values.size()) != g.cell_count())
      throw std::invalid_argument("ScalarField: value count mismatch");
  }

  double& operator[](long i) { return values[static_cast<std::size_t>(i)]; }
  double operator[](long i) const { return values[static_cast<std::size_t>(i)]; }
  long size() const { return grid.cell_count(); }

  bool all_finite() const {
    for (double v : values)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

// Boolean mask on a grid; a discrete set of finite perimeter.
struct IndicatorSet {
  Grid grid;
  std::vector<std::uint8_t> mask;

  IndicatorSet() = default;
  explicit IndicatorSet(const Grid& g, bool fill = false)
      : grid(g), mask(static_cast<std::size_t>(g.cell_count()), fill ? 1 : 0) {}

  bool contains(long i) const { return mask[static_cast<std::size_t>(i)] != 0; }
  void set(long i, bool b) { mask[static_cast<std::size_t>(i)] = b ? 1 : 0; }
  long size() const { return grid.cell_count(); }

  long cardinality() const {
    long n = 0;
    for (auto b : mask) n += (b != 0);
    return n;
  }
  bool empty() const { return cardinality() == 0; }
  double volume() const { return grid.cell_volume() * static_cast<double>(cardinality()); }

  IndicatorSet complement() const {
    IndicatorSet c(grid);
    for (std::size_t i = 0; i < mask.size(); ++i) c.mask[i] = mask[i] ? 0 : 1;
    return c;
  }

  ScalarField to_field() const {
    ScalarField f(grid);
    for (std::size_t i = 0; i < mask.size(); ++i) f.values[i] = mask[i] ? 1.0 : 0.0;
    return f;
  }

  bool operator==(const IndicatorSet& o) const {
    return grid == o.grid && mask == o.mask;
  }
};

inline void require_same_grid(const Grid& a, const Grid& b, const char* who) {
  if (a != b) throw std::invalid_argument(std::string(who) + ": grids mismatch");
}

}  // namespace tvlab
