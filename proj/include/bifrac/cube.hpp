#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bifrac {

inline constexpr int kMaxDim = 2;

using Point = std::array<double, kMaxDim>;

inline Point point1(double x) { return {x, 0.0}; }
inline Point point2(double x, double y) { return {x, y}; }

/// Address of a cube inside a shifted dyadic grid.  The cube is
///   2^{-level} ([0,1)^n + index + (-1)^level * shift),
/// where shift = shift_thirds / 3 per axis, shift_thirds in {0,1}.
struct CubeAddress {
  int level = 0;
  std::array<long long, kMaxDim> index{};
  std::array<int, kMaxDim> shift_thirds{};

  // Corner coordinate on one axis, measured in units of 2^{-level}/3.
  // Exact integer: 3*index + (-1)^level * shift_thirds.
  long long corner_thirds(int axis) const {
    const long long sign = (level % 2 == 0) ? 1 : -1;
    return 3 * index[axis] + sign * shift_thirds[axis];
  }
};

/// Axis-aligned half-open cube [corner, corner + side)^n.
class Cube {
 public:
  Cube(int dim, const Point& corner, double side);

  static Cube interval(double lo, double hi);
  static Cube square(double x0, double y0, double side);

  int dim() const { return dim_; }
  double side() const { return side_; }
  double corner(int axis) const { return corner_[axis]; }
  double upper(int axis) const { return corner_[axis] + side_; }
  double center(int axis) const { return corner_[axis] + 0.5 * side_; }
  double volume() const;

  /// Concentric closed triple 3Q, realized as center +- 1.5*side.
  Cube triple() const;

  /// Half-open membership test in plain double arithmetic.
  bool contains(const Point& p) const;
  /// [a,a+s) subset of [c,c+S) test in plain double arithmetic.
  bool contains(const Cube& inner) const;

  bool addressed() const { return address_.has_value(); }
  const CubeAddress& address() const;

  std::string describe() const;

 private:
  friend class DyadicGrid;
  Point corner_{};
  double side_ = 0;
  int dim_ = 0;
  std::optional<CubeAddress> address_;
};

/// Shifted dyadic grid D^t = {2^{-k}([0,1)^n + m + (-1)^k t)}, t in {0,1/3}^n.
/// Shifts are kept as integer thirds so grid combinatorics stay exact.
class DyadicGrid {
 public:
  DyadicGrid(int dim, std::array<int, kMaxDim> shift_thirds);

  static DyadicGrid standard(int dim);
  /// All 2^n shifted grids in lexicographic order of the shift vector.
  static std::vector<DyadicGrid> shifted_family(int dim);

  int dim() const { return dim_; }
  const std::array<int, kMaxDim>& shift_thirds() const { return shift_; }
  std::string name() const;  // "t0", "t13", "t0x13", ...

  Cube cube(int level, std::array<long long, kMaxDim> index) const;

  /// The unique level-k cube of this grid containing `point` (half-open).
  Cube cube_at(int level, const Point& point) const;

  Cube parent(const Cube& c) const;
  std::vector<Cube> children(const Cube& c) const;

  /// Exact membership test: is `p` in the addressed cube `c`?
  bool contains_point(const Cube& c, const Point& p) const;
  /// Exact containment of a free cube in an addressed cube.
  bool contains_cube(const Cube& outer, const Cube& inner) const;

 private:
  void check_owned(const Cube& c) const;
  int dim_;
  std::array<int, kMaxDim> shift_;
};

struct LernerCover {
  DyadicGrid grid;
  Cube cube;
};

/// Lerner covering: a shifted dyadic cube Q_t with q subset Q_t and
/// side(Q_t) <= 6 side(q).  Deterministic scan: shifts in lexicographic
/// order, then levels from the smallest admissible cube upward; returns
/// the first hit.
LernerCover lerner_cover(const Cube& q);

}  // namespace bifrac
