#include "bifrac/cube.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace bifrac {

namespace {

// floor(num / 3) for an exactly represented long double num.
long long floor_over_three(long double num) {
  long long q = static_cast<long long>(std::floor(static_cast<double>(num / 3.0L)));
  while (static_cast<long double>(3 * (q + 1)) <= num) ++q;
  while (static_cast<long double>(3 * q) > num) --q;
  return q;
}

// 3 * 2^level * x, exact in long double for |x| and levels of desk scale
// (53-bit mantissa times 3 fits in the 64-bit long double mantissa).
long double scaled_thirds(double x, int level) {
  return 3.0L * ldexpl(static_cast<long double>(x), level);
}

}  // namespace

Cube::Cube(int dim, const Point& corner, double side)
    : corner_(corner), side_(side), dim_(dim) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("cube dimension must be 1 or 2");
  if (!(side > 0) || !std::isfinite(side)) throw std::invalid_argument("cube side must be positive and finite");
  for (int a = 0; a < dim; ++a)
    if (!std::isfinite(corner[a])) throw std::invalid_argument("cube corner must be finite");
}

Cube Cube::interval(double lo, double hi) { return Cube(1, {lo, 0.0}, hi - lo); }

Cube Cube::square(double x0, double y0, double side) { return Cube(2, {x0, y0}, side); }

double Cube::volume() const {
  double v = side_;
  for (int a = 1; a < dim_; ++a) v *= side_;
  return v;
}

Cube Cube::triple() const {
  Point c = corner_;
  for (int a = 0; a < dim_; ++a) c[a] -= side_;
  return Cube(dim_, c, 3.0 * side_);
}

bool Cube::contains(const Point& p) const {
  for (int a = 0; a < dim_; ++a)
    if (!(p[a] >= corner_[a] && p[a] < corner_[a] + side_)) return false;
  return true;
}

bool Cube::contains(const Cube& inner) const {
  if (inner.dim_ != dim_) return false;
  for (int a = 0; a < dim_; ++a) {
    if (inner.corner_[a] < corner_[a]) return false;
    if (inner.corner_[a] + inner.side_ > corner_[a] + side_) return false;
  }
  return true;
}

const CubeAddress& Cube::address() const {
  if (!address_) throw std::invalid_argument("cube is not addressed to a dyadic grid");
  return *address_;
}

std::string Cube::describe() const {
  std::ostringstream os;
  os << "corner=(";
  for (int a = 0; a < dim_; ++a) {
    if (a) os << " ";
    os << corner_[a];
  }
  os << ") side=" << side_;
  if (address_) os << " level=" << address_->level;
  return os.str();
}

DyadicGrid::DyadicGrid(int dim, std::array<int, kMaxDim> shift_thirds)
    : dim_(dim), shift_(shift_thirds) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("grid dimension must be 1 or 2");
  for (int a = 0; a < dim; ++a)
    if (shift_[a] != 0 && shift_[a] != 1)
      throw std::invalid_argument("grid shift must be 0 or 1/3 per axis");
}

DyadicGrid DyadicGrid::standard(int dim) { return DyadicGrid(dim, {0, 0}); }

std::vector<DyadicGrid> DyadicGrid::shifted_family(int dim) {
  std::vector<DyadicGrid> out;
  const int count = 1 << dim;
  for (int bits = 0; bits < count; ++bits) {
    std::array<int, kMaxDim> t{};
    // lexicographic order: first axis is the most significant digit
    for (int a = 0; a < dim; ++a) t[a] = (bits >> (dim - 1 - a)) & 1;
    out.emplace_back(dim, t);
  }
  return out;
}

std::string DyadicGrid::name() const {
  std::string s = "t";
  for (int a = 0; a < dim_; ++a) {
    if (a) s += "x";
    s += shift_[a] ? "13" : "0";
  }
  return s;
}

Cube DyadicGrid::cube(int level, std::array<long long, kMaxDim> index) const {
  CubeAddress addr{level, index, shift_};
  Point corner{};
  for (int a = 0; a < dim_; ++a) {
    const long double c3 = static_cast<long double>(addr.corner_thirds(a));
    corner[a] = static_cast<double>(ldexpl(c3 / 3.0L, -level));
  }
  Cube c(dim_, corner, std::ldexp(1.0, -level));
  c.address_ = addr;
  return c;
}

Cube DyadicGrid::cube_at(int level, const Point& point) const {
  const long long sign = (level % 2 == 0) ? 1 : -1;
  std::array<long long, kMaxDim> index{};
  for (int a = 0; a < dim_; ++a) {
    if (!std::isfinite(point[a])) throw std::invalid_argument("cube_at requires a finite point");
    // m = floor(2^k x - (-1)^k t) = floor((3*2^k*x - sigma)/3), sigma integer
    const long double num = scaled_thirds(point[a], level) - static_cast<long double>(sign * shift_[a]);
    index[a] = floor_over_three(num);
  }
  return cube(level, index);
}

void DyadicGrid::check_owned(const Cube& c) const {
  const CubeAddress& addr = c.address();
  if (c.dim() != dim_) throw std::invalid_argument("cube dimension does not match grid");
  for (int a = 0; a < dim_; ++a)
    if (addr.shift_thirds[a] != shift_[a])
      throw std::invalid_argument("cube belongs to a different dyadic grid");
}

Cube DyadicGrid::parent(const Cube& c) const {
  check_owned(c);
  const CubeAddress& addr = c.address();
  const long long sign = (addr.level % 2 == 0) ? 1 : -1;
  std::array<long long, kMaxDim> up{};
  for (int a = 0; a < kMaxDim; ++a) {
    const long long shifted = addr.index[a] + sign * shift_[a];
    // floor division by 2
    up[a] = (shifted >= 0) ? shifted / 2 : -((-shifted + 1) / 2);
  }
  return cube(addr.level - 1, up);
}

std::vector<Cube> DyadicGrid::children(const Cube& c) const {
  check_owned(c);
  const CubeAddress& addr = c.address();
  const int child_level = addr.level + 1;
  const long long child_sign = (child_level % 2 == 0) ? 1 : -1;
  std::vector<Cube> out;
  const int count = 1 << dim_;
  for (int bits = 0; bits < count; ++bits) {
    std::array<long long, kMaxDim> idx{};
    for (int a = 0; a < dim_; ++a) {
      const long long offset = (bits >> a) & 1;
      idx[a] = 2 * addr.index[a] + offset - child_sign * shift_[a];
    }
    out.push_back(cube(child_level, idx));
  }
  return out;
}

bool DyadicGrid::contains_point(const Cube& c, const Point& p) const {
  check_owned(c);
  const CubeAddress& addr = c.address();
  for (int a = 0; a < dim_; ++a) {
    const long double z = scaled_thirds(p[a], addr.level);
    const long double lo = static_cast<long double>(addr.corner_thirds(a));
    if (!(z >= lo && z < lo + 3.0L)) return false;
  }
  return true;
}

bool DyadicGrid::contains_cube(const Cube& outer, const Cube& inner) const {
  check_owned(outer);
  const CubeAddress& addr = outer.address();
  if (inner.addressed() && inner.address().shift_thirds == shift_) {
    // same grid: exact integer comparison in units of 2^{-k_inner}/3
    const CubeAddress& in = inner.address();
    const int delta = in.level - addr.level;
    if (delta < 0) return false;
    for (int a = 0; a < dim_; ++a) {
      const long long out_lo = addr.corner_thirds(a) << delta;
      const long long in_lo = in.corner_thirds(a);
      if (in_lo < out_lo) return false;
      if (in_lo + 3 > out_lo + (3LL << delta)) return false;
    }
    return true;
  }
  for (int a = 0; a < dim_; ++a) {
    const long double lo = static_cast<long double>(addr.corner_thirds(a));
    const long double zlo = scaled_thirds(inner.corner(a), addr.level);
    if (zlo < lo) return false;
    const long double zhi =
        3.0L * (ldexpl(static_cast<long double>(inner.corner(a)), addr.level) +
                ldexpl(static_cast<long double>(inner.side()), addr.level));
    if (zhi > lo + 3.0L) return false;
  }
  return true;
}

LernerCover lerner_cover(const Cube& q) {
  // Smallest admissible level: largest k with 2^{-k} >= side(q).
  int k0 = static_cast<int>(std::floor(-std::log2(q.side())));
  while (std::ldexp(1.0, -k0) < q.side()) --k0;
  while (std::ldexp(1.0, -(k0 + 1)) >= q.side()) ++k0;

  Point corner{};
  for (int a = 0; a < q.dim(); ++a) corner[a] = q.corner(a);

  for (const DyadicGrid& grid : DyadicGrid::shifted_family(q.dim())) {
    for (int k = k0; std::ldexp(1.0, -k) <= 6.0 * q.side(); --k) {
      Cube candidate = grid.cube_at(k, corner);
      if (grid.contains_cube(candidate, q)) return {grid, candidate};
    }
  }
  throw std::logic_error("lerner_cover: no shifted dyadic cover found");
}

}  // namespace bifrac
