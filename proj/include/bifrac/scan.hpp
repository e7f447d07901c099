#pragma once

#include <cstdint>
#include <vector>

#include "bifrac/grid_function.hpp"

namespace bifrac {

/// Cell-aligned cube of the scan family: side 2^{-side_level}, corner at cell
/// index `start` (per axis), spanning `span` cells per axis.
struct ScanCube {
  int side_level = 0;
  std::array<long long, kMaxDim> start{};
  long long span = 1;
};

/// Finite surrogate for sup_Q: all cell-cornered cubes with dyadic side
/// lengths 2^{-j}, j in [-L0, L] (optionally strided), plus seeded random
/// off-mesh cubes.
class CubeScan {
 public:
  static CubeScan mesh_aligned(const Mesh& mesh, long long corner_stride = 1,
                               int side_level_min = -100, int side_level_max = 100);

  void add_random(int count, uint64_t seed);
  void add_cube(const Cube& q);

  const Mesh& mesh() const { return mesh_; }
  const std::vector<ScanCube>& aligned() const { return aligned_; }
  const std::vector<Cube>& free_cubes() const { return free_; }
  Cube to_cube(const ScanCube&) const;
  size_t size() const { return aligned_.size() + free_.size(); }

 private:
  explicit CubeScan(const Mesh& mesh) : mesh_(mesh) {}
  Mesh mesh_;
  std::vector<ScanCube> aligned_;
  std::vector<Cube> free_;
};

/// Pointwise max-painting of per-cube values onto cell centers.
class MaxField {
 public:
  explicit MaxField(const Mesh& mesh)
      : mesh_(mesh), vals_(static_cast<size_t>(mesh.cell_count()), 0.0) {}

  void paint(const ScanCube& sc, double value);
  void paint(const Cube& q, double value);
  GridFunction take() { return GridFunction(mesh_, std::move(vals_)); }

 private:
  Mesh mesh_;
  std::vector<double> vals_;
};

}  // namespace bifrac
