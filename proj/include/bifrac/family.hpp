#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "bifrac/grid_function.hpp"

namespace bifrac {

enum class FamilyKind {
  indicator,
  tent,
  truncated_power,
  log_weight,
  random_nonnegative,
  necessity,
};

FamilyKind family_kind_from_name(std::string_view name);
std::string_view family_kind_name(FamilyKind kind);

struct FamilySpec {
  FamilyKind kind = FamilyKind::indicator;
  int count = 1;             // members for the randomized kinds
  std::optional<Cube> box;   // support (defaults to [0,1)^n)
  double exponent = -0.5;    // truncated_power / necessity
  const GridFunction* base = nullptr;  // necessity: weight grid to be powered
  // random members draw on this coarse lattice, so the same seed denotes the
  // same function at every mesh resolution
  int coarse_level = 4;
};

/// Deterministic family of non-negative, bounded, compactly supported test
/// functions.  Identical (mesh, spec, seed) always produces identical cells.
std::vector<GridFunction> make_test_family(const Mesh& mesh, const FamilySpec& spec,
                                           uint64_t seed);

}  // namespace bifrac
