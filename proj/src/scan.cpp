#include "bifrac/scan.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace bifrac {

CubeScan CubeScan::mesh_aligned(const Mesh& mesh, long long corner_stride, int side_level_min,
                                int side_level_max) {
  mesh.validate();
  if (corner_stride < 1) throw std::invalid_argument("scan stride must be >= 1");
  CubeScan scan(mesh);
  const long long s = mesh.cells_per_axis();
  const int j_lo = std::max(side_level_min, -mesh.box_level);
  const int j_hi = std::min(side_level_max, mesh.res_level);
  size_t budget = 0;
  for (int j = j_lo; j <= j_hi; ++j) {
    const long long span = 1LL << (mesh.res_level - j);
    for (long long ix = 0; ix + span <= s; ix += corner_stride) {
      if (mesh.dim == 1) {
        scan.aligned_.push_back({j, {ix, 0}, span});
        ++budget;
      } else {
        for (long long iy = 0; iy + span <= s; iy += corner_stride) {
          scan.aligned_.push_back({j, {ix, iy}, span});
          ++budget;
        }
      }
      if (budget > 4'000'000) throw std::length_error("cube scan too large; raise the stride");
    }
  }
  return scan;
}

void CubeScan::add_random(int count, uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double w = mesh_.half_width(), h = mesh_.cell_side();
  std::uniform_real_distribution<double> pos(-w, w);
  std::uniform_real_distribution<double> logside(std::log2(2 * h), std::log2(w));
  for (int k = 0; k < count; ++k) {
    const double side = std::exp2(logside(rng));
    Point c{pos(rng), mesh_.dim == 2 ? pos(rng) : 0.0};
    for (int a = 0; a < mesh_.dim; ++a) c[a] = std::min(c[a], w - side);
    free_.emplace_back(mesh_.dim, c, side);
  }
}

void CubeScan::add_cube(const Cube& q) {
  if (q.dim() != mesh_.dim) throw std::invalid_argument("scan cube dimension mismatch");
  free_.push_back(q);
}

Cube CubeScan::to_cube(const ScanCube& sc) const {
  const double side = std::ldexp(1.0, -sc.side_level);
  Point corner{mesh_.cell_corner(sc.start[0]),
               mesh_.dim == 2 ? mesh_.cell_corner(sc.start[1]) : 0.0};
  return Cube(mesh_.dim, corner, side);
}

void MaxField::paint(const ScanCube& sc, double value) {
  const long long s = mesh_.cells_per_axis();
  if (mesh_.dim == 1) {
    for (long long i = sc.start[0]; i < sc.start[0] + sc.span; ++i)
      vals_[static_cast<size_t>(i)] = std::max(vals_[static_cast<size_t>(i)], value);
    return;
  }
  for (long long j = sc.start[1]; j < sc.start[1] + sc.span; ++j)
    for (long long i = sc.start[0]; i < sc.start[0] + sc.span; ++i)
      vals_[static_cast<size_t>(i + s * j)] = std::max(vals_[static_cast<size_t>(i + s * j)], value);
}

void MaxField::paint(const Cube& q, double value) {
  const auto [x0, x1] = center_range(mesh_, q.corner(0), q.upper(0));
  const long long s = mesh_.cells_per_axis();
  if (mesh_.dim == 1) {
    for (long long i = x0; i < x1; ++i)
      vals_[static_cast<size_t>(i)] = std::max(vals_[static_cast<size_t>(i)], value);
    return;
  }
  const auto [y0, y1] = center_range(mesh_, q.corner(1), q.upper(1));
  for (long long j = y0; j < y1; ++j)
    for (long long i = x0; i < x1; ++i)
      vals_[static_cast<size_t>(i + s * j)] = std::max(vals_[static_cast<size_t>(i + s * j)], value);
}

}  // namespace bifrac
