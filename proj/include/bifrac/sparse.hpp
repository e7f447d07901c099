#pragma once

#include <iosfwd>
#include <map>
#include <vector>

#include "bifrac/cube.hpp"
#include "bifrac/grid_function.hpp"
#include "bifrac/young.hpp"

namespace bifrac {

/// The selection functional F(Q) = [|Q|^{alpha/n}] ||f||_{Phi,Q} ||g||_{Psi,Q}.
/// Without the volume flag this is the Orlicz-product selection; with it, the
/// dyadic maximal-functional selection.
struct CzFunctional {
  const GridFunction* f = nullptr;
  const GridFunction* g = nullptr;
  YoungFunction phi = YoungFunction::power(1);
  YoungFunction psi = YoungFunction::power(1);
  double alpha = 0;
  bool include_volume = false;

  double operator()(const Cube& q) const;
};

/// Level-indexed family of selected maximal dyadic cubes Q_j^k with carved
/// sets E_j^k = Q_j^k \ Omega_{k+1}, held as exact cell masks.
class SparseFamily {
 public:
  struct Selected {
    explicit Selected(Cube c) : cube(std::move(c)) {}
    Cube cube;
    double functional = 0;
    std::array<long long, kMaxDim> cell_lo{};  // center-in-cube cell range
    std::array<long long, kMaxDim> cell_hi{};
    long long q_cells = 0;  // in-domain mask cells
    long long e_cells = 0;  // in-domain mask cells not in Omega_{k+1}
    double q_volume = 0;    // true |Q|
    double e_volume = 0;    // |Q| minus the level-(k+1) selected volume inside

    /// |E|/|Q| in exact dyadic measures (the truncated mask may lose the
    /// out-of-box part of a straddling cube, the volumes never do).
    double carve_ratio() const { return q_volume > 0 ? e_volume / q_volume : 1.0; }
  };

  const Mesh& mesh() const { return mesh_; }
  const DyadicGrid& grid() const { return grid_; }
  double threshold_base() const { return a_; }
  int k_min() const { return k_min_; }
  int k_max() const { return k_max_; }
  bool empty() const { return levels_.empty(); }
  long long cube_count() const;

  const std::vector<Selected>& level(int k) const;
  const std::vector<int> level_indices() const;
  /// Cell mask of Omega_k (union of level-k selected cubes).
  const std::vector<uint8_t>& omega_mask(int k) const;

  /// Minimum |E|/|Q| over every selected cube (1 if the family is empty).
  double min_carve_ratio() const;
  /// Each mesh cell is covered by at most one carved set.
  bool carved_sets_disjoint() const;

  void write_json(std::ostream& os) const;

 private:
  friend SparseFamily cz_select(const GridFunction&, const GridFunction&, const YoungFunction&,
                                const YoungFunction&, double, const DyadicGrid&, double, bool);
  SparseFamily(const Mesh& mesh, const DyadicGrid& grid, double a)
      : mesh_(mesh), grid_(grid), a_(a) {}
  Mesh mesh_;
  DyadicGrid grid_;
  double a_;
  int k_min_ = 0, k_max_ = -1;
  std::map<int, std::vector<Selected>> levels_;
  std::map<int, std::vector<uint8_t>> omega_;
};

/// Calderon-Zygmund selection: for each k in the attainable range, the
/// maximal dyadic cubes of `grid` with F(Q) > a^k.
SparseFamily cz_select(const GridFunction& f, const GridFunction& g, const YoungFunction& phi,
                       const YoungFunction& psi, double a, const DyadicGrid& grid,
                       double alpha = 0, bool include_volume = false);

/// One Orlicz factor of a sparse sum: ||base||_{young,Q}^{exponent}.
struct SparseTerm {
  const GridFunction* base = nullptr;
  YoungFunction young = YoungFunction::power(1);
  double exponent = 1.0;
};

/// sum over selected cubes of |Q|^{volume_exponent} * prod_i term_i(Q).
double sparse_sum(const SparseFamily& family, double volume_exponent,
                  const std::vector<SparseTerm>& terms);

/// sum over the dyadic subtree below `top` of (|Q|/|top|)^{alpha q / n + 1}:
/// cubes enumerated explicitly down to `explicit_depth`, the geometric tail
/// summed in closed form per level; the whole sum collapses to
/// 2^{alpha q} / (2^{alpha q} - 1).
double dyadic_subtree_weight_sum(const DyadicGrid& grid, const Cube& top, double alpha, double q,
                                 int explicit_depth = 10, double tail_tol = 1e-14);

}  // namespace bifrac
