#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "bifrac/cube.hpp"

namespace bifrac {

/// Truncated uniform mesh: domain box [-W, W)^n with W = 2^{box_level},
/// square cells of side h = 2^{-res_level}.
struct Mesh {
  int dim = 1;
  int box_level = 2;
  int res_level = 10;

  double half_width() const { return std::ldexp(1.0, box_level); }
  double cell_side() const { return std::ldexp(1.0, -res_level); }
  long long cells_per_axis() const { return 1LL << (box_level + 1 + res_level); }
  long long cell_count() const {
    long long s = cells_per_axis();
    return dim == 1 ? s : s * s;
  }
  double cell_corner(long long i) const {
    return std::ldexp(static_cast<double>(2 * i - cells_per_axis()), -res_level - 1);
  }
  double cell_center(long long i) const {
    return std::ldexp(static_cast<double>(2 * i + 1 - cells_per_axis()), -res_level - 1);
  }
  Cube domain_box() const;
  Cube cell_box(long long ix, long long iy = 0) const;
  void validate() const;
  bool operator==(const Mesh&) const = default;
};

/// Weighted sample view of a function over a cube: per overlapped cell the
/// overlap volume and the cell value.  `volume` is the full cube volume
/// including any part outside the domain box (where the function is 0).
struct CubeSlice {
  std::vector<double> weight;
  std::vector<double> value;
  double volume = 0;
  double max_abs = 0;

  template <class F>
  double mean(F&& f) const {
    long double acc = 0;
    for (size_t i = 0; i < weight.size(); ++i) acc += weight[i] * static_cast<long double>(f(value[i]));
    return static_cast<double>(acc / volume);
  }
};

/// Piecewise-constant function on a truncated mesh; implicit 0 outside the
/// domain box.  Immutable after construction; prefix tables are built once.
class GridFunction {
 public:
  GridFunction(const Mesh& mesh, std::vector<double> values);

  static GridFunction constant(const Mesh&, double c);
  static GridFunction zeros(const Mesh&);
  /// Exact per-cell overlap fraction of `box` (indicator's L1 projection).
  static GridFunction indicator(const Mesh&, const Cube& box);
  /// |x|^a via exact cell averages; cells whose closure meets the origin get
  /// the cell-center value when a <= -n (the average diverges there).
  static GridFunction abs_power(const Mesh&, double exponent);
  /// Cell averages of log|x| (closed form for n=1; center samples with an
  /// h/2 clip at the origin cells for n=2).
  static GridFunction log_abs(const Mesh&);

  template <class F>
  static GridFunction sample(const Mesh& mesh, F&& f) {
    std::vector<double> v(static_cast<size_t>(mesh.cell_count()));
    const long long s = mesh.cells_per_axis();
    if (mesh.dim == 1) {
      for (long long i = 0; i < s; ++i) v[static_cast<size_t>(i)] = f(Point{mesh.cell_center(i), 0.0});
    } else {
      for (long long j = 0; j < s; ++j)
        for (long long i = 0; i < s; ++i)
          v[static_cast<size_t>(i + s * j)] = f(Point{mesh.cell_center(i), mesh.cell_center(j)});
    }
    return GridFunction(mesh, std::move(v));
  }

  const Mesh& mesh() const { return mesh_; }
  std::span<const double> values() const { return values_; }
  long long flat(long long ix, long long iy = 0) const { return ix + mesh_.cells_per_axis() * iy; }
  double value(long long flat_index) const { return values_[static_cast<size_t>(flat_index)]; }
  double value_at(const Point& p) const;
  double min_value() const { return min_; }
  double max_value() const { return max_; }

  double integral() const;
  double integral_over(const Cube& q) const;
  double average(const Cube& q) const;
  double lp_norm(double p, const GridFunction* weight = nullptr) const;

  /// Sum of cell values (not scaled by h^n) over an index block, via the
  /// prefix tables.
  double block_sum(long long i0, long long i1) const;
  double block_sum(long long i0, long long i1, long long j0, long long j1) const;

  GridFunction map(const std::function<double(double)>& f) const;
  static GridFunction zip(const GridFunction& a, const GridFunction& b,
                          const std::function<double(double, double)>& f);
  GridFunction powered(double e) const;
  GridFunction scaled(double c) const;

  void write_binary(std::ostream&) const;
  static GridFunction read_binary(std::istream&);
  void write_csv(std::ostream&) const;
  static GridFunction read_csv(std::istream&);

 private:
  Mesh mesh_;
  std::vector<double> values_;
  std::vector<long double> prefix_;  // 1-D: S+1 entries; 2-D: (S+1)^2
  double min_ = 0, max_ = 0;
};

CubeSlice cube_slice(const GridFunction& f, const Cube& q);

/// Per-axis overlap of [lo, hi) with the mesh cells.  Weights are in units of
/// the cell side.
struct AxisOverlap {
  long long begin = 0, end = 0;  // overlapped cell range [begin, end)
  std::vector<double> w;         // weight per cell in the range
  bool empty() const { return begin >= end; }
};
AxisOverlap axis_overlap(const Mesh&, double lo, double hi);

/// Cells whose center lies in [lo, hi): index range [first, last).
std::pair<long long, long long> center_range(const Mesh&, double lo, double hi);

}  // namespace bifrac
